#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tokparity {

// The five-case English pronoun paradigm. "gen-dep" is the dependent genitive
// used before a noun ("her book"), "gen-indep" the independent genitive that
// stands alone ("the book is hers").
enum class PronounCase {
    Nominative = 0,
    Accusative = 1,
    PossessivePronominal = 2,   // gen-dep
    PossessivePredicative = 3,  // gen-indep
    Reflexive = 4,
};

inline constexpr std::size_t kNumCases = 5;
inline constexpr std::array<PronounCase, kNumCases> kAllCases = {
    PronounCase::Nominative,       PronounCase::Accusative,
    PronounCase::PossessivePronominal, PronounCase::PossessivePredicative,
    PronounCase::Reflexive,
};

constexpr std::size_t case_index(PronounCase c) { return static_cast<std::size_t>(c); }

// Placeholder names used in template bodies and serialized files.
std::string_view case_placeholder(PronounCase c);  // nom, acc, gen-dep, gen-indep, reflex
std::optional<PronounCase> case_from_placeholder(std::string_view name);

struct PronounFamily {
    std::string id;
    std::array<std::string, kNumCases> forms;              // lowercase surfaces
    std::array<std::string, kNumCases> capitalized_forms;  // initial-uppercase surfaces
    bool is_neopronoun = false;

    const std::string& form(PronounCase c, bool capitalized = false) const {
        return capitalized ? capitalized_forms[case_index(c)] : forms[case_index(c)];
    }
};

enum class DeclarationStyle {
    FourForm,  // nom/acc/gen-dep/reflex, the usual declaration shape
    FiveForm,  // all five cases
};

// "he/him/his/himself" style declaration string for a family.
std::string declaration(const PronounFamily& family, DeclarationStyle style = DeclarationStyle::FourForm);

// One row of the cross-family case transfer table.
struct CaseTransfer {
    std::string from_family;
    PronounCase from_case;
    std::string to_family;
    PronounCase to_case;
};

class PronounLexicon {
  public:
    // he, she, xe.
    static PronounLexicon bundled();

    // JSON schema:
    // {"families": [{"id": ..., "forms": {"nom","acc","gen_dep","gen_indep","reflex"},
    //                "neopronoun": bool}, ...]}
    static PronounLexicon load(const std::string& path);
    static PronounLexicon from_json_text(std::string_view json_text);
    std::string to_json_text() const;

    void add_family(PronounFamily family);  // validates invariants, throws std::invalid_argument

    const std::vector<PronounFamily>& families() const { return families_; }
    const PronounFamily* find(std::string_view id) const;
    const PronounFamily& at(std::string_view id) const;  // throws std::out_of_range

    std::vector<std::string> binary_family_ids() const;
    std::vector<std::string> neopronoun_family_ids() const;

    // Every (family, case) whose lowercase form equals the lowercased surface.
    std::vector<std::pair<std::string, PronounCase>> lookup(std::string_view surface) const;

    // Same-case transfer onto another family, preserving capitalization style.
    std::string map_case(std::string_view source_family, PronounCase c,
                         std::string_view target_family, bool capitalized = false) const;

    // The identity-on-case transfer table between binary and neopronoun
    // families, in both directions. Total over the bundled lexicon.
    std::vector<CaseTransfer> case_transfer_table() const;

  private:
    std::vector<PronounFamily> families_;
};

}  // namespace tokparity
