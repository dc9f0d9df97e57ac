#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tokparity/scorer.hpp"

namespace tokparity {

struct RemoteOptions {
    int max_attempts = 3;
    int backoff_base_ms = 100;  // doubles per retry
    int timeout_sec = 10;
    std::string cache_dir;  // empty disables the on-disk response cache
};

// HTTP client for an external scoring service. Protocol: POST with JSON body
// {"context": str, "candidates": [str]} answered by
// {"logprobs": {candidate: float}}. Responses are cached on disk keyed by the
// request hash, so repeated evaluations skip the network entirely.
class RemoteScorer final : public CandidateScorer {
  public:
    explicit RemoteScorer(const std::string& endpoint_url, RemoteOptions options = {});

    std::vector<CandidateScore> score(const std::string& context,
                                      const std::vector<std::string>& candidates) override;

    // Per-candidate log-probabilities, keyed by candidate string.
    std::map<std::string, double> score_map(const std::string& context,
                                            const std::vector<std::string>& candidates);

    int network_calls() const { return network_calls_; }

  private:
    std::string post_with_retries(const std::string& body);

    std::string host_;
    int port_ = 80;
    std::string path_ = "/score";
    RemoteOptions options_;
    int network_calls_ = 0;
};

}  // namespace tokparity
