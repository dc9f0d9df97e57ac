#pragma once

#include <string>
#include <vector>

#include "tokparity/bpe.hpp"
#include "tokparity/lm.hpp"

namespace tokparity {

struct CandidateScore {
    double logprob = 0.0;  // sum of log P over the candidate's tokens given the context
    int tokens = 1;        // candidate token count (1 when the scorer cannot know)
};

// Transition-probability scoring of candidate continuations: everything the
// evaluation metrics need from a model. Whole-sequence likelihood is the
// special case of an empty context.
class CandidateScorer {
  public:
    virtual ~CandidateScorer() = default;
    virtual std::vector<CandidateScore> score(const std::string& context,
                                              const std::vector<std::string>& candidates) = 0;
};

// Scores through a tokenizer + LmBackend pair. Candidates are tokenized on
// their own; the caller arranges for the context/candidate junction to fall
// on a pre-token boundary (candidates carry their own leading space).
class BackendScorer final : public CandidateScorer {
  public:
    BackendScorer(const TokenizerModel& tokenizer, const LmBackend& backend)
        : tokenizer_(tokenizer), backend_(backend) {}

    std::vector<CandidateScore> score(const std::string& context,
                                      const std::vector<std::string>& candidates) override;

  private:
    const TokenizerModel& tokenizer_;
    const LmBackend& backend_;
};

}  // namespace tokparity
