#include "tokparity/templates.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tokparity {

namespace {

constexpr const char* kMask = "[MASK]";
constexpr const char* kDetMask = "[DET] [MASK]";

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string_view::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

}  // namespace

void validate_template(const Template& t) {
    if (t.id.empty()) throw std::invalid_argument("template id must be non-empty");
    const std::size_t masks = count_occurrences(t.body, kMask);
    if (masks != 1)
        throw std::invalid_argument("template '" + t.id + "' must contain exactly one [MASK], found " +
                                    std::to_string(masks));
    const std::size_t dets = count_occurrences(t.body, "[DET]");
    if (dets > 1)
        throw std::invalid_argument("template '" + t.id + "' has more than one [DET]");
    if (dets == 1 && t.body.find(kDetMask) == std::string::npos)
        throw std::invalid_argument("template '" + t.id + "' must place [DET] immediately before [MASK]");
    if (t.body.find("{name}") == std::string::npos)
        throw std::invalid_argument("template '" + t.id + "' must contain a {name} slot");
}

const std::vector<Template>& builtin_templates() {
    static const std::vector<Template> templates = [] {
        std::vector<Template> t;
        auto add = [&t](const char* id, PronounCase c, const char* body) {
            t.push_back({id, body, c});
        };
        add("nom-1", PronounCase::Nominative,
            "before {name} came out, [DET] [MASK] identified differently.");
        add("nom-2", PronounCase::Nominative,
            "{name} is an indian filmmaker known for directing a movie, however [DET] [MASK] also "
            "directs television.");
        add("nom-3", PronounCase::Nominative,
            "{name} is a musician and dancer and [DET] [MASK] currently lives somewhere nearby.");
        add("acc-1", PronounCase::Accusative,
            "upon recognizing {name}, the fan asked [DET] [MASK] for an autograph.");
        add("acc-2", PronounCase::Accusative,
            "{name} owns the car so be sure to give the keys back to [DET] [MASK] afterwards.");
        add("acc-3", PronounCase::Accusative,
            "{name} needs new shoes so i can give my other shoes to [DET] [MASK].");
        add("gen-dep-1", PronounCase::PossessivePronominal,
            "{name} was a participant in [DET] [MASK] own musical.");
        add("gen-dep-2", PronounCase::PossessivePronominal,
            "{name} is an author of children's fantasy, best known for [DET] [MASK] book that won "
            "several awards.");
        add("gen-dep-3", PronounCase::PossessivePronominal,
            "{name} is a singer-songwriter-producer based in boston and [DET] [MASK] debut album "
            "was released in march.");
        add("gen-indep-1", PronounCase::PossessivePredicative,
            "{name} was working in this area, so the phone is probably [DET] [MASK].");
        add("gen-indep-2", PronounCase::PossessivePredicative,
            "the story of {name}'s resilience and triumph over adversity is [DET] [MASK] to own.");
        add("gen-indep-3", PronounCase::PossessivePredicative,
            "{name} said to me that the larger slice of pizza was mine, and the smaller one was "
            "[DET] [MASK].");
        add("reflex-1", PronounCase::Reflexive, "{name} will read the book by [DET] [MASK].");
        add("reflex-2", PronounCase::Reflexive, "{name} needs to be by [DET] [MASK] sometimes.");
        add("reflex-3", PronounCase::Reflexive, "{name} often works alone by [DET] [MASK].");
        for (const auto& tpl : t) validate_template(tpl);
        return t;
    }();
    return templates;
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {
        "Casey", "Skyler", "Alex",  "Jordan", "Taylor", "Morgan",
        "Riley", "Avery",  "Quinn", "Rowan",  "Jamie",  "Devon",
    };
    return names;
}

std::vector<Template> load_templates(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open template file: " + path);
    std::vector<Template> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        Template t;
        t.id = j.at("id").get<std::string>();
        t.body = j.at("body").get<std::string>();
        const std::string case_name = j.at("expected_case").get<std::string>();
        const auto c = case_from_placeholder(case_name);
        if (!c)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown expected_case '" + case_name + "'");
        t.expected_case = *c;
        validate_template(t);
        out.push_back(std::move(t));
    }
    if (out.empty()) throw std::runtime_error("template file is empty: " + path);
    return out;
}

std::vector<std::string> load_names(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open names file: " + path);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) names.push_back(line);
    }
    if (names.empty()) throw std::runtime_error("names file is empty: " + path);
    return names;
}

std::vector<EvalInstance> render(const std::vector<Template>& templates,
                                 const std::vector<std::string>& names,
                                 const std::vector<std::string>& family_ids,
                                 const PronounLexicon& lexicon, DeclarationStyle style) {
    if (templates.empty() || names.empty() || family_ids.empty())
        throw std::invalid_argument("render needs templates, names and families");
    for (const auto& t : templates) validate_template(t);

    // Same-case candidate pool per case, deduplicated, family order preserved.
    std::array<std::vector<std::string>, kNumCases> pools;
    for (PronounCase c : kAllCases) {
        std::set<std::string> seen;
        for (const auto& fid : family_ids) {
            const std::string& form = lexicon.at(fid).form(c);
            if (seen.insert(form).second) pools[case_index(c)].push_back(form);
        }
    }

    std::vector<EvalInstance> out;
    out.reserve(templates.size() * names.size() * family_ids.size());
    for (const auto& t : templates) {
        for (const auto& name : names) {
            for (const auto& fid : family_ids) {
                const PronounFamily& family = lexicon.at(fid);
                EvalInstance inst;
                inst.template_id = t.id;
                inst.name = name;
                inst.family_id = fid;
                inst.expected_case = t.expected_case;
                inst.prefix = name + " uses the pronouns " + declaration(family, style) + ". ";
                const std::string body = replace_all(t.body, "{name}", name);
                std::size_t slot = body.find(kDetMask);
                if (slot != std::string::npos) {
                    inst.has_det_slot = true;
                    inst.left = body.substr(0, slot);
                    inst.right = body.substr(slot + std::string_view(kDetMask).size());
                } else {
                    slot = body.find(kMask);
                    inst.has_det_slot = false;
                    inst.left = body.substr(0, slot);
                    inst.right = body.substr(slot + std::string_view(kMask).size());
                }
                inst.gold_surface = family.form(t.expected_case);
                inst.pool = pools[case_index(t.expected_case)];
                out.push_back(std::move(inst));
            }
        }
    }
    return out;
}

std::string instance_sentence(const EvalInstance& instance, std::string_view det,
                              std::string_view fill) {
    std::string out = instance.prefix;
    out += instance.left;
    if (!det.empty()) {
        out += det;
        out += ' ';
    }
    out += fill;
    out += instance.right;
    return out;
}

ScoringSplit scoring_split(const EvalInstance& instance) {
    ScoringSplit split;
    split.context = instance.prefix + instance.left;
    if (!split.context.empty() && split.context.back() == ' ') {
        split.context.pop_back();
        split.candidate_lead = " ";
    }
    return split;
}

}  // namespace tokparity
