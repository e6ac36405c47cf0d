#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "kreg/dataset.hpp"

namespace kreg {

/// Interleave `bits_per_dim` bits of each coordinate into one key; coordinate
/// 0 contributes the least-significant bit of each d-bit group. Monotone in
/// every coordinate with the others held fixed.
inline std::uint64_t morton_key(std::span<const std::uint64_t> q,
                                unsigned bits_per_dim) {
    const std::size_t d = q.size();
    if (d == 0 || bits_per_dim == 0 || d * bits_per_dim > 64)
        throw std::invalid_argument("morton_key: bit budget exceeds 64");
    for (std::uint64_t c : q)
        if (bits_per_dim < 64 && (c >> bits_per_dim) != 0)
            throw std::invalid_argument("morton_key: coordinate exceeds bit width");
    std::uint64_t key = 0;
    for (unsigned b = 0; b < bits_per_dim; ++b)
        for (std::size_t j = 0; j < d; ++j)
            key |= ((q[j] >> b) & 1ull) << (b * d + j);
    return key;
}

inline unsigned default_zorder_bits(std::size_t d) {
    if (d == 0 || d > 64) throw std::invalid_argument("default_zorder_bits: bad dimension");
    if (d <= 3) return 21;
    if (d <= 6) return 10;
    return static_cast<unsigned>(64 / d);
}

/// Z-order permutation of the dataset's point indices. Coordinates are
/// affinely quantized per dimension over the dataset extent before
/// interleaving; a degenerate extent quantizes that dimension to 0. Ties are
/// broken by original index (stable). For d=1 the order is exactly the
/// stable sort by x: quantization is skipped so bucket collisions between
/// distinct coordinates cannot perturb the order.
inline std::vector<std::uint32_t> sort_by_zorder(const Dataset& ds,
                                                 unsigned bits_per_dim = 0) {
    const std::size_t n = ds.size();
    const std::size_t d = ds.dim();
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);

    if (d == 1) {
        const auto& xs = ds.coords();
        std::stable_sort(perm.begin(), perm.end(),
                         [&xs](std::uint32_t a, std::uint32_t b) { return xs[a] < xs[b]; });
        return perm;
    }

    if (bits_per_dim == 0) bits_per_dim = default_zorder_bits(d);
    if (d * bits_per_dim > 64)
        throw std::invalid_argument("sort_by_zorder: bit budget exceeds 64");

    const double max_q = static_cast<double>((bits_per_dim >= 64)
                                                 ? ~0ull
                                                 : ((1ull << bits_per_dim) - 1));
    const auto& lo = ds.extent_lo();
    const auto& hi = ds.extent_hi();
    std::vector<double> scale(d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
        if (hi[j] > lo[j]) scale[j] = max_q / (hi[j] - lo[j]);

    std::vector<std::uint64_t> keys(n);
    std::vector<std::uint64_t> q(d);
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = ds.x(i);
        for (std::size_t j = 0; j < d; ++j) {
            double u = (xi[j] - lo[j]) * scale[j];
            u = std::min(std::max(u, 0.0), max_q);
            q[j] = static_cast<std::uint64_t>(u);
        }
        keys[i] = morton_key(q, bits_per_dim);
    }
    std::stable_sort(perm.begin(), perm.end(), [&keys](std::uint32_t a, std::uint32_t b) {
        return keys[a] < keys[b];
    });
    return perm;
}

}  // namespace kreg
