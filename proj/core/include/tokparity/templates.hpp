#pragma once

#include <string>
#include <vector>

#include "tokparity/pronouns.hpp"

namespace tokparity {

// A masked evaluation template. The body contains exactly one [MASK], an
// optional [DET] immediately before it ("[DET] [MASK]"), and a {name} slot.
// expected_case is the pronoun case that makes the body grammatical.
struct Template {
    std::string id;
    std::string body;
    PronounCase expected_case = PronounCase::Nominative;
};

// The bundled template set: three templates per case, biography-flavored.
const std::vector<Template>& builtin_templates();
const std::vector<std::string>& builtin_names();

// JSONL: {"id": ..., "body": ..., "expected_case": "nom|acc|gen-dep|gen-indep|reflex"}
std::vector<Template> load_templates(const std::string& path);
std::vector<std::string> load_names(const std::string& path);  // one per line

// Throws std::invalid_argument on placeholder violations.
void validate_template(const Template& t);

// One scored item: a declared name, a masked sentence, the gold pronoun and
// the candidate pool of same-case forms across the evaluated families.
struct EvalInstance {
    std::string template_id;
    std::string name;
    std::string family_id;
    PronounCase expected_case = PronounCase::Nominative;
    std::string prefix;  // "Casey uses the pronouns he/him/his/himself. "
    std::string left;    // body before the slot, name resolved
    std::string right;   // body after the slot
    bool has_det_slot = false;
    std::string gold_surface;
    std::vector<std::string> pool;
};

// Cartesian product templates x names x families.
std::vector<EvalInstance> render(const std::vector<Template>& templates,
                                 const std::vector<std::string>& names,
                                 const std::vector<std::string>& family_ids,
                                 const PronounLexicon& lexicon,
                                 DeclarationStyle style = DeclarationStyle::FourForm);

// Full sentence with the determiner slot and mask filled. An empty determiner
// leaves no double space behind.
std::string instance_sentence(const EvalInstance& instance, std::string_view det,
                              std::string_view fill);

// Left context for transition-probability scoring and the matching candidate
// region text (leading space included when the slot follows one).
struct ScoringSplit {
    std::string context;         // prefix + left, trailing slot space removed
    std::string candidate_lead;  // " " when the slot follows a space, else ""
};
ScoringSplit scoring_split(const EvalInstance& instance);

}  // namespace tokparity
