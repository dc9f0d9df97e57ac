#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tokparity/lm.hpp"

namespace tokparity {

enum class Smoothing {
    AbsoluteDiscount,  // interpolated absolute discounting, lower orders as backoff
    AddK,              // interpolated add-k with the lower order as prior
};

struct NGramOptions {
    int order = 3;  // 2..5 is the intended range
    Smoothing smoothing = Smoothing::AbsoluteDiscount;
    double discount = 0.75;  // absolute-discount parameter
    double add_k = 0.5;      // add-k parameter
};

// Count-based backend. Probabilities interpolate down to a uniform 1/|V|
// floor, so every token has positive probability under any context.
class NGramLm final : public LmBackend {
  public:
    static NGramLm train(const std::vector<std::vector<int>>& corpus, std::size_t vocab_size,
                         const NGramOptions& options = {});

    std::size_t vocab_size() const override { return vocab_size_; }
    std::vector<double> next_dist(std::span<const int> context) const override;

    // Raw count accessors (no smoothing), exposed for tests.
    std::int64_t ngram_count(std::span<const int> ngram) const;
    std::int64_t context_total(std::span<const int> context) const;

    const NGramOptions& options() const { return options_; }

  private:
    NGramLm() = default;

    struct ContextNode {
        std::int64_t total = 0;
        std::unordered_map<int, std::int64_t> children;  // next token -> count
    };

    static std::string key_of(std::span<const int> ids);

    std::size_t vocab_size_ = 0;
    NGramOptions options_;
    std::unordered_map<std::string, ContextNode> contexts_;
};

}  // namespace tokparity
