#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tokparity/bpe.hpp"
#include "tokparity/pronouns.hpp"

namespace tokparity {

struct PronounOccurrence {
    std::size_t begin = 0;  // byte span [begin, end)
    std::size_t end = 0;
    std::string family_id;
    PronounCase pcase = PronounCase::Nominative;
    bool capitalized = false;
    bool low_confidence = false;  // her/his call fell back to the dominant tag
};

struct Document {
    std::string id;
    std::string text;
    bool augmented = false;
    std::string split;  // empty until assigned: train | val | test
};

// JSONL ingestion: one {"id": ..., "text": ...} object per line. Output adds
// {"augmented": bool, "split": ...} when set.
std::vector<Document> read_jsonl(const std::string& path);
std::vector<Document> read_jsonl_stream(std::istream& in, const std::string& origin);
void write_jsonl(const std::string& path, const std::vector<Document>& docs);
std::string document_json_line(const Document& doc);

// Whole-word, case-insensitive occurrences of the given families' forms,
// sorted and non-overlapping. her/his spans carry the disambiguated case.
std::vector<PronounOccurrence> find_pronoun_occurrences(
    const std::string& text, const PronounLexicon& lexicon,
    const std::vector<std::string>& family_ids);

// Documents with at least one binary-pronoun occurrence.
std::vector<Document> filter_binary(const std::vector<Document>& docs, const PronounLexicon& lexicon);

struct Disambiguation {
    PronounCase pcase = PronounCase::PossessivePronominal;
    bool confident = true;
};

// Rule-based stand-in for a POS tagger on the two genuinely ambiguous binary
// surfaces. "her": noun-like next word -> dependent possessive, otherwise
// accusative. "his": noun-like next word -> dependent possessive, otherwise
// independent possessive. Unknown open-class next words default to the
// dominant possessive reading with confident=false.
Disambiguation disambiguate_her_his(std::string_view text, std::size_t begin, std::size_t end);

struct AugmentationPlan {
    double resource_level = 0.0;  // fraction of documents rewritten, in [0, 1]
    std::string target_family = "xe";
    std::uint64_t seed = 0;
    bool document_level = true;  // selection granularity (occurrence-level unsupported)
};

struct AugmentStats {
    std::size_t selected_docs = 0;
    std::size_t replaced_occurrences = 0;
    std::size_t low_confidence = 0;
};

// Rewrites every source-family pronoun in each selected document with the
// same-case target form, capitalization preserved. Slash-joined declarations
// ("he/him/his/himself") are rewritten wholesale first so their case slots
// stay aligned. Selection is a seeded floor(level * N)-subset of the corpus.
// An empty source list means all binary families.
std::vector<Document> augment(const std::vector<Document>& docs, const AugmentationPlan& plan,
                              const PronounLexicon& lexicon,
                              const std::vector<std::string>& source_families = {},
                              AugmentStats* stats = nullptr);

// Single-document rewrite engine used by augment.
std::string rewrite_pronouns(const std::string& text, const PronounLexicon& lexicon,
                             const std::vector<std::string>& source_families,
                             const std::string& target_family, AugmentStats* stats = nullptr);

struct SplitRatios {
    double train = 0.8;
    double val = 0.1;
    // test takes the remainder
};

// Assigns train/val/test by document id before chunking, then cuts each
// document into windows of at most `window` tokens. No source document
// contributes chunks to two splits. Needs at least 3 documents.
std::vector<Document> chunk_and_split(const std::vector<Document>& docs, const TokenizerModel& tokenizer,
                                      std::size_t window, SplitRatios ratios, std::uint64_t seed);

}  // namespace tokparity
