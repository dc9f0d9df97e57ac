#pragma once

#include <map>
#include <string>
#include <vector>

#include "tokparity/bpe.hpp"
#include "tokparity/pronouns.hpp"

namespace tokparity {

struct GroupedWord {
    std::string word;
    std::string group;
};

// Subword counts per word plus per-group aggregates. A word is "intact" when
// it encodes to a single token.
struct FertilityReport {
    struct Entry {
        std::string word;
        std::string group;
        int count = 0;
    };
    std::vector<Entry> per_word;
    std::map<std::string, double> group_mean;
    std::map<std::string, double> intact_fraction;

    std::string to_json_text() const;
    std::string table() const;
};

// Token count of each word, measured space-prefixed by default (the
// mid-sentence occurrence that dominates running text).
FertilityReport fertility(const TokenizerModel& model, const std::vector<GroupedWord>& words,
                          bool space_prefixed = true);
FertilityReport fertility(const TokenizerModel& model, const std::vector<std::string>& words,
                          bool space_prefixed = true);

struct ParityReport {
    struct Row {
        std::string family;
        double mean_fertility = 0.0;
        double intact_fraction = 0.0;
    };
    std::vector<Row> rows;
    bool parity = false;  // true iff every family's mean fertility is exactly 1.0

    std::string to_json_text() const;
    std::string table() const;
};

// Per-family fertility over the lexicon's lowercase forms.
ParityReport parity_report(const TokenizerModel& model, const PronounLexicon& lexicon);

}  // namespace tokparity
