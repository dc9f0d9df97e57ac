#include "tokparity/ptp.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tokparity {

namespace {

// Unique surfaces of a family in a stable order: case order, lowercase before
// capitalized, duplicates (families that share a surface across cases) once.
std::vector<std::string> family_surfaces(const PronounFamily& family, bool include_capitalized) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (PronounCase c : kAllCases) {
        for (bool cap : {false, true}) {
            if (cap && !include_capitalized) continue;
            const std::string& s = family.form(c, cap);
            if (seen.insert(s).second) out.push_back(s);
        }
    }
    return out;
}

}  // namespace

std::pair<TokenizerModel, PtpPatch> ameliorate(TokenizerModel model, const PronounFamily& family,
                                               const AmeliorateOptions& options) {
    PtpPatch patch;
    patch.family_id = family.id;
    patch.prior_vocab_size = model.vocab_size();
    for (const std::string& surface : family_surfaces(family, options.include_capitalized)) {
        const std::string probe = " " + surface;
        if (model.encode(probe).size() != 1) {
            const std::string units = bytecodec::to_units(probe);
            bool added = false;
            const int id = model.add_special_token(units, &added);
            if (added) patch.added.emplace_back(units, id);
        }
        if (options.add_unmarked_variants && model.encode(surface).size() != 1) {
            const std::string units = bytecodec::to_units(surface);
            bool added = false;
            const int id = model.add_special_token(units, &added);
            if (added) patch.added.emplace_back(units, id);
        }
    }
    patch.new_vocab_size = model.vocab_size();
    return {std::move(model), std::move(patch)};
}

VerificationReport verify(const TokenizerModel& model, const PronounFamily& family) {
    VerificationReport report;
    report.family_id = family.id;
    report.pass = true;
    for (const std::string& surface : family_surfaces(family, /*include_capitalized=*/true)) {
        FormCheck check;
        check.form = surface;
        check.probe_text = " " + surface;
        const auto ids = model.encode(check.probe_text);
        check.tokens = model.token_strings(ids);
        check.pass = ids.size() == 1 && check.tokens[0].rfind(model.space_marker(), 0) == 0;
        report.pass = report.pass && check.pass;
        report.checks.push_back(std::move(check));
    }
    return report;
}

std::string PtpPatch::to_json_text() const {
    nlohmann::json j;
    j["family"] = family_id;
    j["added"] = nlohmann::json::array();
    for (const auto& [token, id] : added) j["added"].push_back({{"token", token}, {"id", id}});
    j["prior_size"] = prior_vocab_size;
    j["new_size"] = new_vocab_size;
    return j.dump(2) + "\n";
}

PtpPatch PtpPatch::from_json_text(std::string_view json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    PtpPatch patch;
    patch.family_id = j.at("family").get<std::string>();
    for (const auto& e : j.at("added"))
        patch.added.emplace_back(e.at("token").get<std::string>(), e.at("id").get<int>());
    patch.prior_vocab_size = j.at("prior_size").get<std::size_t>();
    patch.new_vocab_size = j.at("new_size").get<std::size_t>();
    if (patch.new_vocab_size - patch.prior_vocab_size != patch.added.size())
        throw std::invalid_argument("patch size bookkeeping does not match added token count");
    return patch;
}

void PtpPatch::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write patch file: " + path);
    out << to_json_text();
}

PtpPatch PtpPatch::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open patch file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string VerificationReport::to_json_text() const {
    nlohmann::json j;
    j["family"] = family_id;
    j["pass"] = pass;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back(
            {{"form", c.form}, {"probe", c.probe_text}, {"tokens", c.tokens}, {"pass", c.pass}});
    return j.dump(2) + "\n";
}

std::string VerificationReport::table() const {
    std::ostringstream os;
    std::size_t width = 4;
    for (const auto& c : checks) width = std::max(width, c.form.size());
    for (const auto& c : checks) {
        os << (c.pass ? "ok   " : "FAIL ") << c.form;
        os << std::string(width - c.form.size() + 2, ' ') << "[";
        for (std::size_t i = 0; i < c.tokens.size(); ++i) {
            if (i) os << ", ";
            os << '"' << c.tokens[i] << '"';
        }
        os << "]\n";
    }
    os << (pass ? "parity: pass" : "parity: FAIL") << "\n";
    return os.str();
}

}  // namespace tokparity
