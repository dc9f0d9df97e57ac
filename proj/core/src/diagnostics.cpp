#include "tokparity/diagnostics.hpp"

#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tokparity {

FertilityReport fertility(const TokenizerModel& model, const std::vector<GroupedWord>& words,
                          bool space_prefixed) {
    if (words.empty()) throw std::invalid_argument("fertility requires a non-empty word list");
    FertilityReport report;
    std::map<std::string, std::pair<long, long>> acc;  // group -> (token sum, word count)
    std::map<std::string, long> intact;
    for (const auto& [word, group] : words) {
        const std::string probe = space_prefixed ? " " + word : word;
        const int count = static_cast<int>(model.encode(probe).size());
        report.per_word.push_back({word, group, count});
        acc[group].first += count;
        acc[group].second += 1;
        if (count == 1) intact[group] += 1;
    }
    for (const auto& [group, sums] : acc) {
        report.group_mean[group] = static_cast<double>(sums.first) / static_cast<double>(sums.second);
        report.intact_fraction[group] =
            static_cast<double>(intact[group]) / static_cast<double>(sums.second);
    }
    return report;
}

FertilityReport fertility(const TokenizerModel& model, const std::vector<std::string>& words,
                          bool space_prefixed) {
    std::vector<GroupedWord> grouped;
    grouped.reserve(words.size());
    for (const auto& w : words) grouped.push_back({w, "all"});
    return fertility(model, grouped, space_prefixed);
}

std::string FertilityReport::to_json_text() const {
    nlohmann::json j;
    j["per_word"] = nlohmann::json::array();
    for (const auto& e : per_word)
        j["per_word"].push_back({{"word", e.word}, {"group", e.group}, {"count", e.count}});
    j["group_mean"] = group_mean;
    j["intact_fraction"] = intact_fraction;
    return j.dump(2) + "\n";
}

std::string FertilityReport::table() const {
    std::size_t ww = 5, gw = 5;
    for (const auto& e : per_word) {
        ww = std::max(ww, e.word.size());
        gw = std::max(gw, e.group.size());
    }
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(ww) + 2) << "word"
       << std::setw(static_cast<int>(gw) + 2) << "group" << "tokens\n";
    for (const auto& e : per_word)
        os << std::left << std::setw(static_cast<int>(ww) + 2) << e.word
           << std::setw(static_cast<int>(gw) + 2) << e.group << e.count << "\n";
    os << "\n";
    for (const auto& [group, mean] : group_mean) {
        os << std::left << std::setw(static_cast<int>(gw) + 2) << group << "fertility "
           << std::fixed << std::setprecision(3) << mean << "  intact " << std::setprecision(3)
           << intact_fraction.at(group) << "\n";
    }
    return os.str();
}

ParityReport parity_report(const TokenizerModel& model, const PronounLexicon& lexicon) {
    std::vector<GroupedWord> words;
    for (const auto& family : lexicon.families()) {
        std::set<std::string> seen;
        for (PronounCase c : kAllCases) {
            const std::string& form = family.form(c);
            if (seen.insert(form).second) words.push_back({form, family.id});
        }
    }
    const FertilityReport fr = fertility(model, words, /*space_prefixed=*/true);
    ParityReport report;
    report.parity = true;
    for (const auto& family : lexicon.families()) {
        ParityReport::Row row;
        row.family = family.id;
        row.mean_fertility = fr.group_mean.at(family.id);
        row.intact_fraction = fr.intact_fraction.at(family.id);
        report.parity = report.parity && row.mean_fertility == 1.0;
        report.rows.push_back(row);
    }
    return report;
}

std::string ParityReport::to_json_text() const {
    nlohmann::json j;
    j["families"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["families"].push_back({{"family", r.family},
                                 {"fertility", r.mean_fertility},
                                 {"intact_fraction", r.intact_fraction}});
    j["parity"] = parity;
    return j.dump(2) + "\n";
}

std::string ParityReport::table() const {
    std::size_t fw = 6;
    for (const auto& r : rows) fw = std::max(fw, r.family.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(fw) + 2) << "family" << "fertility  intact\n";
    for (const auto& r : rows)
        os << std::left << std::setw(static_cast<int>(fw) + 2) << r.family << std::fixed
           << std::setprecision(3) << std::setw(11) << r.mean_fertility << std::setprecision(3)
           << r.intact_fraction << "\n";
    os << (parity ? "parity: true" : "parity: false") << "\n";
    return os.str();
}

}  // namespace tokparity
