#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tokparity {

// Scoring contract shared by every backend: a full next-token distribution
// given a (possibly empty) left context, and from it the total sequence
// negative log-likelihood in natural-log units.
class LmBackend {
  public:
    virtual ~LmBackend() = default;

    virtual std::size_t vocab_size() const = 0;

    // Probability vector over the vocabulary; sums to 1 within 1e-9.
    virtual std::vector<double> next_dist(std::span<const int> context) const = 0;

    // -sum_i log P(x_i | x_<i), always derived from next_dist so the two
    // views of the model cannot drift apart.
    double sequence_nll(std::span<const int> tokens) const;

    double log_prob(std::span<const int> context, int next) const;
};

}  // namespace tokparity
