#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tokparity/metrics.hpp"

namespace tokparity {

namespace {

// Average ranks (1-based); ties share the mean of the ranks they span.
std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: input lengths differ");
    if (x.size() < 2) throw std::invalid_argument("spearman: need at least two points");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const auto n = static_cast<double>(x.size());
    const double mean = (n + 1.0) / 2.0;  // mean of 1..n, also of any tie-averaged ranks
    double cov = 0.0, var_x = 0.0, var_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if (var_x == 0.0 || var_y == 0.0)
        throw std::domain_error("spearman: undefined for constant input");
    return cov / std::sqrt(var_x * var_y);
}

}  // namespace tokparity
