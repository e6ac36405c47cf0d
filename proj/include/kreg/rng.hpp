#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kreg {

/// Deterministic random source used by every seeded operation in the library.
///
/// The engine is std::mt19937_64 (algorithm fixed by the C++ standard); the
/// variate conversions below are hand-rolled so that streams are
/// bit-reproducible across standard-library implementations:
///   - uniform doubles take the top 53 bits of one engine output,
///   - integers in [0,n) use a 128-bit multiply-shift of one output,
///   - normals use the Box-Muller transform on two uniforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0,1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + uniform() * (hi - lo);
    }

    /// Uniform integer in [0,n). Requires n > 0.
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

    /// N(mean, stddev^2) via Box-Muller; the second variate of each pair is
    /// cached so consecutive calls consume exactly one pair of uniforms.
    double normal(double mean = 0.0, double stddev = 1.0) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = 1.0 - uniform();  // (0,1], keeps log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return mean + stddev * (r * std::cos(theta));
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kreg
