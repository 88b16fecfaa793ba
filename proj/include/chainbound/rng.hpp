#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace chainbound {

// Thin wrapper around mt19937_64 with portable derived draws. The standard
// distributions (uniform_int_distribution etc.) are implementation-defined,
// so identical seeds could produce different streams across standard
// libraries; everything here is pinned to the mt19937_64 output sequence,
// which the standard fully specifies.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

// Uniform k-subset of {0, ..., n-1} via Floyd's algorithm, returned sorted.
std::vector<int> sample_without_replacement(int n, int k, Rng& rng);

}  // namespace chainbound
