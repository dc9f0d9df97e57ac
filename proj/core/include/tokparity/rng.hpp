#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tokparity {

// Deterministic random primitives built on mt19937_64. std::shuffle and
// std::normal_distribution are implementation-defined, so anything that feeds
// frozen expected values or on-disk artifacts goes through these instead.

// Uniform integer in [0, n) via rejection sampling.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Uniform double in [0, 1) with 53-bit resolution.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// Box-Muller gaussian; caches the second variate so a stream of draws is
// reproducible regardless of call pattern granularity.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double sample(double mean, double stddev) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = uniform_unit(rng_);
        double u2 = uniform_unit(rng_);
        while (u1 <= 0.0) u1 = uniform_unit(rng_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return mean + stddev * r * std::cos(theta);
    }

  private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Mixes a base seed with a stream tag so pipeline stages draw from
// independent deterministic streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

}  // namespace tokparity
