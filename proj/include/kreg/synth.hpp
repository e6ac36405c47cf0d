#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kreg/dataset.hpp"
#include "kreg/rng.hpp"

namespace kreg {

/// AR(1) time series: x_i = i and y_i = c + phi * y_{i-1} + N(0, noise_sigma)
/// for i >= 1, y_0 = y0. Bit-reproducible for a fixed seed.
inline Dataset synth_ar1(std::size_t n, double c, double phi, double y0,
                         double noise_sigma, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("synth_ar1: n must be >= 1");
    if (noise_sigma < 0.0) throw std::invalid_argument("synth_ar1: negative noise");
    Rng rng(seed);
    std::vector<double> xs(n), ys(n), ws(n, 1.0);
    ys[0] = y0;
    xs[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        xs[i] = static_cast<double>(i);
        ys[i] = c + phi * ys[i - 1] + noise_sigma * rng.normal();
    }
    return Dataset(1, std::move(xs), std::move(ys), std::move(ws));
}

}  // namespace kreg
