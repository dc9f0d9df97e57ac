#include "tokparity/results.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tokparity/hash.hpp"

namespace tokparity {

nlohmann::json metric_slice_json(const MetricSlice& slice, bool include_records) {
    nlohmann::json j;
    j["per_family"] = nlohmann::json::object();
    for (const auto& [family, frac] : slice.per_family) {
        j["per_family"][family] = {
            {"value", frac.value()}, {"numerator", frac.num}, {"denominator", frac.den}};
    }
    if (include_records) {
        j["records"] = nlohmann::json::array();
        for (const auto& r : slice.records) {
            j["records"].push_back({{"template", r.template_id},
                                    {"name", r.name},
                                    {"family", r.family_id},
                                    {"case", std::string(case_placeholder(r.expected_case))},
                                    {"metric", r.metric},
                                    {"predicted", r.predicted},
                                    {"gold", r.gold},
                                    {"score", r.predicted_score},
                                    {"hit", r.hit}});
        }
    }
    return j;
}

nlohmann::json metric_result_json(const MetricResult& result, bool include_records) {
    nlohmann::json j;
    j["consistency"] = metric_slice_json(result.consistency, include_records);
    j["case_error"] = metric_slice_json(result.case_error, include_records);
    j["inject_error"] = metric_slice_json(result.inject_error, include_records);
    return j;
}

nlohmann::json results_document(const nlohmann::json& config, std::uint64_t tokenizer_hash,
                                const MetricResult& result) {
    nlohmann::json doc;
    doc["config"] = config;
    doc["config_hash"] = hex64(fnv1a(config.dump()));
    doc["tokenizer_hash"] = hex64(tokenizer_hash);
    doc["metrics"] = metric_result_json(result, /*include_records=*/false);
    nlohmann::json records = nlohmann::json::array();
    for (const MetricSlice* slice :
         {&result.consistency, &result.case_error, &result.inject_error}) {
        const nlohmann::json slice_json = metric_slice_json(*slice);
        for (const auto& item : slice_json.at("records")) records.push_back(item);
    }
    doc["records"] = records;
    return doc;
}

std::string results_csv(const MetricResult& result) {
    std::set<std::string> families;
    for (const auto& [family, frac] : result.consistency.per_family) families.insert(family);
    for (const auto& [family, frac] : result.case_error.per_family) families.insert(family);
    for (const auto& [family, frac] : result.inject_error.per_family) families.insert(family);
    std::ostringstream os;
    os << "family,consistency,case_error,inject_error,instances\n";
    auto value_of = [](const MetricSlice& slice, const std::string& family) {
        auto it = slice.per_family.find(family);
        return it == slice.per_family.end() ? Fraction{} : it->second;
    };
    for (const auto& family : families) {
        const Fraction c = value_of(result.consistency, family);
        const Fraction e = value_of(result.case_error, family);
        const Fraction i = value_of(result.inject_error, family);
        os << family << ',' << c.value() << ',' << e.value() << ',' << i.value() << ',' << c.den
           << '\n';
    }
    return os.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace tokparity
