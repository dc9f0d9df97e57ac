#include "tokparity/pronouns.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tokparity {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string capitalize(std::string_view s) {
    std::string out(s);
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

constexpr std::array<std::string_view, kNumCases> kPlaceholders = {
    "nom", "acc", "gen-dep", "gen-indep", "reflex",
};

// Keys used in lexicon JSON (underscored variants of the placeholders).
constexpr std::array<std::string_view, kNumCases> kJsonKeys = {
    "nom", "acc", "gen_dep", "gen_indep", "reflex",
};

void validate_family(const PronounFamily& f) {
    if (f.id.empty()) throw std::invalid_argument("pronoun family id must be non-empty");
    for (std::size_t i = 0; i < kNumCases; ++i) {
        const std::string& form = f.forms[i];
        if (form.empty())
            throw std::invalid_argument("family '" + f.id + "' is missing a form for case " +
                                        std::string(kPlaceholders[i]));
        if (form != to_lower(form))
            throw std::invalid_argument("family '" + f.id + "' form '" + form + "' must be lowercase");
        if (f.capitalized_forms[i] != capitalize(form))
            throw std::invalid_argument("family '" + f.id + "' capitalized form mismatch for '" + form + "'");
    }
}

}  // namespace

std::string_view case_placeholder(PronounCase c) { return kPlaceholders[case_index(c)]; }

std::optional<PronounCase> case_from_placeholder(std::string_view name) {
    for (std::size_t i = 0; i < kNumCases; ++i) {
        if (kPlaceholders[i] == name || kJsonKeys[i] == name) return kAllCases[i];
    }
    return std::nullopt;
}

std::string declaration(const PronounFamily& family, DeclarationStyle style) {
    std::ostringstream os;
    os << family.form(PronounCase::Nominative) << '/' << family.form(PronounCase::Accusative) << '/'
       << family.form(PronounCase::PossessivePronominal);
    if (style == DeclarationStyle::FiveForm)
        os << '/' << family.form(PronounCase::PossessivePredicative);
    os << '/' << family.form(PronounCase::Reflexive);
    return os.str();
}

PronounLexicon PronounLexicon::bundled() {
    auto make = [](std::string id, std::array<std::string, kNumCases> forms, bool neo) {
        PronounFamily f;
        f.id = std::move(id);
        f.forms = std::move(forms);
        for (std::size_t i = 0; i < kNumCases; ++i) f.capitalized_forms[i] = capitalize(f.forms[i]);
        f.is_neopronoun = neo;
        return f;
    };
    PronounLexicon lex;
    lex.add_family(make("he", {"he", "him", "his", "his", "himself"}, false));
    lex.add_family(make("she", {"she", "her", "her", "hers", "herself"}, false));
    lex.add_family(make("xe", {"xe", "xem", "xir", "xirs", "xirself"}, true));
    return lex;
}

PronounLexicon PronounLexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

PronounLexicon PronounLexicon::from_json_text(std::string_view json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    if (!j.contains("families") || !j["families"].is_array())
        throw std::invalid_argument("lexicon JSON must contain a 'families' array");
    PronounLexicon lex;
    for (const auto& jf : j["families"]) {
        PronounFamily f;
        f.id = jf.at("id").get<std::string>();
        const auto& forms = jf.at("forms");
        for (std::size_t i = 0; i < kNumCases; ++i)
            f.forms[i] = forms.at(std::string(kJsonKeys[i])).get<std::string>();
        for (std::size_t i = 0; i < kNumCases; ++i) f.capitalized_forms[i] = capitalize(f.forms[i]);
        f.is_neopronoun = jf.value("neopronoun", false);
        lex.add_family(std::move(f));
    }
    if (lex.families().empty()) throw std::invalid_argument("lexicon has no families");
    return lex;
}

std::string PronounLexicon::to_json_text() const {
    nlohmann::json j;
    j["families"] = nlohmann::json::array();
    for (const auto& f : families_) {
        nlohmann::json jf;
        jf["id"] = f.id;
        nlohmann::json forms;
        for (std::size_t i = 0; i < kNumCases; ++i) forms[std::string(kJsonKeys[i])] = f.forms[i];
        jf["forms"] = forms;
        jf["neopronoun"] = f.is_neopronoun;
        j["families"].push_back(jf);
    }
    return j.dump(2) + "\n";
}

void PronounLexicon::add_family(PronounFamily family) {
    validate_family(family);
    if (find(family.id) != nullptr)
        throw std::invalid_argument("duplicate pronoun family id: " + family.id);
    families_.push_back(std::move(family));
}

const PronounFamily* PronounLexicon::find(std::string_view id) const {
    for (const auto& f : families_)
        if (f.id == id) return &f;
    return nullptr;
}

const PronounFamily& PronounLexicon::at(std::string_view id) const {
    const PronounFamily* f = find(id);
    if (f == nullptr) throw std::out_of_range("unknown pronoun family: " + std::string(id));
    return *f;
}

std::vector<std::string> PronounLexicon::binary_family_ids() const {
    std::vector<std::string> out;
    for (const auto& f : families_)
        if (!f.is_neopronoun) out.push_back(f.id);
    return out;
}

std::vector<std::string> PronounLexicon::neopronoun_family_ids() const {
    std::vector<std::string> out;
    for (const auto& f : families_)
        if (f.is_neopronoun) out.push_back(f.id);
    return out;
}

std::vector<std::pair<std::string, PronounCase>> PronounLexicon::lookup(std::string_view surface) const {
    if (surface.empty()) throw std::invalid_argument("lookup surface must be non-empty");
    const std::string lowered = to_lower(surface);
    std::vector<std::pair<std::string, PronounCase>> out;
    for (const auto& f : families_) {
        for (PronounCase c : kAllCases) {
            if (f.form(c) == lowered) out.emplace_back(f.id, c);
        }
    }
    return out;
}

std::string PronounLexicon::map_case(std::string_view source_family, PronounCase c,
                                     std::string_view target_family, bool capitalized) const {
    const PronounFamily* src = find(source_family);
    if (src == nullptr)
        throw std::out_of_range("map_case: unknown source family: " + std::string(source_family));
    const PronounFamily* dst = find(target_family);
    if (dst == nullptr)
        throw std::out_of_range("map_case: unknown target family: " + std::string(target_family));
    return dst->form(c, capitalized);
}

std::vector<CaseTransfer> PronounLexicon::case_transfer_table() const {
    std::vector<CaseTransfer> table;
    for (const auto& binary : families_) {
        if (binary.is_neopronoun) continue;
        for (const auto& neo : families_) {
            if (!neo.is_neopronoun) continue;
            for (PronounCase c : kAllCases) {
                table.push_back({binary.id, c, neo.id, c});
                table.push_back({neo.id, c, binary.id, c});
            }
        }
    }
    return table;
}

}  // namespace tokparity
