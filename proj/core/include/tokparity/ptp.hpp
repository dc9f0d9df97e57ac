#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tokparity/bpe.hpp"
#include "tokparity/pronouns.hpp"

namespace tokparity {

// Record of a vocabulary amelioration: which whole-word tokens were added for
// a pronoun family and which ids they received.
struct PtpPatch {
    std::string family_id;
    std::vector<std::pair<std::string, int>> added;  // (token units string, id)
    std::size_t prior_vocab_size = 0;
    std::size_t new_vocab_size = 0;

    std::string to_json_text() const;
    static PtpPatch from_json_text(std::string_view json_text);
    void save(const std::string& path) const;
    static PtpPatch load(const std::string& path);
};

struct AmeliorateOptions {
    // Add initial-uppercase variants alongside the lowercase ones.
    bool include_capitalized = true;
    // Also register marker-free variants so sentence-initial occurrences stay
    // whole. Off by default: the space-marked token is the word form that
    // matters mid-sentence, and unmarked variants double the vocabulary cost.
    bool add_unmarked_variants = false;
};

// Extends the tokenizer so every form of `family` encodes to a single
// space-marked token. Forms that already encode to one token are skipped, so
// re-running is a no-op. The returned patch lists exactly the ids created.
std::pair<TokenizerModel, PtpPatch> ameliorate(TokenizerModel model, const PronounFamily& family,
                                               const AmeliorateOptions& options = {});

struct FormCheck {
    std::string form;        // surface as probed, e.g. "xe" or "Xe"
    std::string probe_text;  // " " + form
    std::vector<std::string> tokens;
    bool pass = false;  // exactly one token, starting with the space marker
};

struct VerificationReport {
    std::string family_id;
    std::vector<FormCheck> checks;
    bool pass = false;

    std::string to_json_text() const;
    std::string table() const;
};

// Probes every form of the family (both capitalizations) with a leading space
// and reports whether it stays a single space-marked token.
VerificationReport verify(const TokenizerModel& model, const PronounFamily& family);

}  // namespace tokparity
