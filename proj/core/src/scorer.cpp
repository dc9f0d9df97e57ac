#include "tokparity/scorer.hpp"

#include <cmath>

namespace tokparity {

std::vector<CandidateScore> BackendScorer::score(const std::string& context,
                                                 const std::vector<std::string>& candidates) {
    const std::vector<int> ctx = tokenizer_.encode(context);
    std::vector<CandidateScore> out;
    out.reserve(candidates.size());
    std::vector<int> ids;
    for (const auto& cand : candidates) {
        const std::vector<int> cand_ids = tokenizer_.encode(cand);
        ids = ctx;
        double logprob = 0.0;
        for (int id : cand_ids) {
            logprob += backend_.log_prob(ids, id);
            ids.push_back(id);
        }
        out.push_back({logprob, static_cast<int>(cand_ids.size())});
    }
    return out;
}

}  // namespace tokparity
