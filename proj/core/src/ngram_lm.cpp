#include "tokparity/ngram_lm.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace tokparity {

std::string NGramLm::key_of(std::span<const int> ids) {
    std::string key(ids.size() * sizeof(int), '\0');
    if (!ids.empty()) std::memcpy(key.data(), ids.data(), ids.size() * sizeof(int));
    return key;
}

NGramLm NGramLm::train(const std::vector<std::vector<int>>& corpus, std::size_t vocab_size,
                       const NGramOptions& options) {
    if (options.order < 1) throw std::invalid_argument("n-gram order must be at least 1");
    if (options.order > 8) throw std::invalid_argument("n-gram order above 8 is not supported");
    if (vocab_size == 0) throw std::invalid_argument("vocab_size must be positive");
    if (corpus.empty()) throw std::invalid_argument("n-gram training corpus is empty");
    if (options.smoothing == Smoothing::AbsoluteDiscount &&
        (options.discount <= 0.0 || options.discount >= 1.0))
        throw std::invalid_argument("absolute discount must lie in (0, 1)");
    if (options.smoothing == Smoothing::AddK && options.add_k <= 0.0)
        throw std::invalid_argument("add-k parameter must be positive");

    NGramLm lm;
    lm.vocab_size_ = vocab_size;
    lm.options_ = options;
    for (const auto& seq : corpus) {
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (seq[i] < 0 || static_cast<std::size_t>(seq[i]) >= vocab_size)
                throw std::out_of_range("token id outside the declared vocabulary");
            for (int ctx_len = 0; ctx_len < options.order; ++ctx_len) {
                if (static_cast<std::size_t>(ctx_len) > i) break;
                std::span<const int> ctx(seq.data() + i - ctx_len, static_cast<std::size_t>(ctx_len));
                ContextNode& node = lm.contexts_[key_of(ctx)];
                ++node.total;
                ++node.children[seq[i]];
            }
        }
    }
    return lm;
}

std::int64_t NGramLm::ngram_count(std::span<const int> ngram) const {
    if (ngram.empty()) return 0;
    auto it = contexts_.find(key_of(ngram.subspan(0, ngram.size() - 1)));
    if (it == contexts_.end()) return 0;
    auto cit = it->second.children.find(ngram.back());
    return cit == it->second.children.end() ? 0 : cit->second;
}

std::int64_t NGramLm::context_total(std::span<const int> context) const {
    auto it = contexts_.find(key_of(context));
    return it == contexts_.end() ? 0 : it->second.total;
}

std::vector<double> NGramLm::next_dist(std::span<const int> context) const {
    std::vector<double> dist(vocab_size_, 1.0 / static_cast<double>(vocab_size_));
    // Interpolate from the empty context up to the longest one that fits the
    // model order, refining the previous level in place.
    const std::size_t max_ctx =
        std::min(context.size(), static_cast<std::size_t>(options_.order - 1));
    for (std::size_t ctx_len = 0; ctx_len <= max_ctx; ++ctx_len) {
        std::span<const int> ctx = context.subspan(context.size() - ctx_len, ctx_len);
        auto it = contexts_.find(key_of(ctx));
        if (it == contexts_.end() || it->second.total == 0) continue;
        const ContextNode& node = it->second;
        const auto total = static_cast<double>(node.total);
        if (options_.smoothing == Smoothing::AbsoluteDiscount) {
            const double d = options_.discount;
            const double lambda = d * static_cast<double>(node.children.size()) / total;
            for (double& p : dist) p *= lambda;
            for (const auto& [w, c] : node.children)
                dist[static_cast<std::size_t>(w)] +=
                    std::max(static_cast<double>(c) - d, 0.0) / total;
        } else {
            const double k = options_.add_k;
            const double denom = total + k;
            for (double& p : dist) p = k * p / denom;
            for (const auto& [w, c] : node.children)
                dist[static_cast<std::size_t>(w)] += static_cast<double>(c) / denom;
        }
    }
    return dist;
}

}  // namespace tokparity
