#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "aslb/funcspace.hpp"

namespace aslb::testing {

/// Seeded generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double real(double lo, double hi) { return lo + (hi - lo) * unit(); }
    long long integer(long long lo, long long hi) {
        return lo + static_cast<long long>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool coin() { return (rng_() & 1) != 0; }
    std::uint64_t bits() { return rng_(); }

    std::vector<double> reals(std::size_t n, double lo, double hi) {
        std::vector<double> v(n);
        for (auto& x : v) x = real(lo, hi);
        return v;
    }

    /// Random sampled function on [0, 1] with n samples.
    SampledFunction function(std::size_t n, double amplitude = 1) {
        return SampledFunction(0, 1, 1.0 / static_cast<double>(n - 1), reals(n, -amplitude, amplitude));
    }

private:
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    std::mt19937_64 rng_;
};

}  // namespace aslb::testing

namespace aslb::testing {

/// Literal sequential arc reflection: repeatedly take the first maximal run of
/// samples beyond one band edge and reflect the whole run across that edge.
inline std::vector<double> sequential_arc_reflection(std::vector<double> y, double lo, double hi, int& passes) {
    passes = 0;
    for (;;) {
        std::size_t i = 0;
        while (i < y.size() && y[i] >= lo && y[i] <= hi) ++i;
        if (i == y.size()) return y;
        const bool above = y[i] > hi;
        const double edge = above ? hi : lo;
        std::size_t j = i;
        while (j < y.size() && (above ? y[j] > hi : y[j] < lo)) {
            y[j] = 2 * edge - y[j];
            ++j;
        }
        ++passes;
    }
}

}  // namespace aslb::testing
