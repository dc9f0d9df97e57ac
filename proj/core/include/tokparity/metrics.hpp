#pragma once

#include <map>
#include <string>
#include <vector>

#include "tokparity/pronouns.hpp"
#include "tokparity/scorer.hpp"
#include "tokparity/templates.hpp"

namespace tokparity {

// Exact ratio; metrics are counts over counts, never re-derived from floats.
struct Fraction {
    long num = 0;
    long den = 0;
    double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
};

struct InstanceRecord {
    std::string template_id;
    std::string name;
    std::string family_id;
    PronounCase expected_case = PronounCase::Nominative;
    std::string metric;     // consistency | case_error | inject_error
    std::string predicted;  // chosen surface / case surface / determiner
    std::string gold;
    double predicted_score = 0.0;
    bool hit = false;  // counts toward the metric's numerator
};

struct MetricSlice {
    std::map<std::string, Fraction> per_family;
    std::vector<InstanceRecord> records;
};

struct EvalOptions {
    // Divide candidate log-probabilities by their token count before the
    // argmax. Off by default: fragmented candidates pay their full cost.
    bool length_normalize = false;
    std::vector<std::string> dets = {"", "the", "a", "this", "these", "those"};
};

// Masked-slot prediction: each pool candidate fills the slot, scored by the
// sum of its tokens' log-probabilities given the left context only; the
// argmax is compared with the declared family's form. Ties break on the
// lexicographically smallest surface. per_family counts correct predictions.
MetricSlice consistency(CandidateScorer& scorer, const std::vector<EvalInstance>& instances,
                        const EvalOptions& options = {});

// Case agreement within the gold family: every distinct case form fills the
// slot, whole sentences are scored (empty context), and the minimum-NLL form
// is compared with the expected case's surface. per_family counts errors.
MetricSlice case_error(CandidateScorer& scorer, const std::vector<EvalInstance>& instances,
                       const PronounLexicon& lexicon, const EvalOptions& options = {});

// Adversarial word insertion: the gold pronoun stays in the slot while the
// determiner varies; a grammatical model picks the empty determiner.
// per_family counts instances where a non-empty determiner won.
MetricSlice inject_error(CandidateScorer& scorer, const std::vector<EvalInstance>& instances,
                         const EvalOptions& options = {});

struct MetricResult {
    MetricSlice consistency;
    MetricSlice case_error;
    MetricSlice inject_error;
};

MetricResult evaluate_all(CandidateScorer& scorer, const std::vector<EvalInstance>& instances,
                          const PronounLexicon& lexicon, const EvalOptions& options = {});

// Spearman rank correlation with average-rank tie handling. Throws
// std::invalid_argument on size mismatch or fewer than two points, and
// std::domain_error when either input is constant (undefined ranks).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tokparity
