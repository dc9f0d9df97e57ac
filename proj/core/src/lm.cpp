#include "tokparity/lm.hpp"

#include <cmath>
#include <stdexcept>

namespace tokparity {

double LmBackend::log_prob(std::span<const int> context, int next) const {
    const auto dist = next_dist(context);
    if (next < 0 || static_cast<std::size_t>(next) >= dist.size())
        throw std::out_of_range("log_prob: token id out of range");
    return std::log(dist[static_cast<std::size_t>(next)]);
}

double LmBackend::sequence_nll(std::span<const int> tokens) const {
    double nll = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        nll -= log_prob(tokens.subspan(0, i), tokens[i]);
    }
    return nll;
}

}  // namespace tokparity
