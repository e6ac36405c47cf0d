#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kreg/dataset.hpp"

namespace kreg {

/// Axis-aligned grid of square cells with side length gamma. Cells are
/// half-open (lo, hi] in every coordinate: a point exactly on a cell's lower
/// boundary belongs to the cell below. Index idx_j satisfies
///   lo_j = origin_j + idx_j * gamma  <  x_j  <=  lo_j + gamma.
struct GridSpec {
    double gamma = 1.0;
    std::vector<double> origin;  // empty = all-zero anchor
    std::size_t dim = 1;

    GridSpec(double g, std::size_t d, std::vector<double> o = {})
        : gamma(g), origin(std::move(o)), dim(d) {
        if (!(g > 0.0) || !std::isfinite(g))
            throw std::invalid_argument("GridSpec: gamma must be positive and finite");
        if (origin.empty()) origin.assign(dim, 0.0);
        if (origin.size() != dim)
            throw std::invalid_argument("GridSpec: origin dimension mismatch");
    }
};

using CellIndex = std::vector<std::int64_t>;

struct CellIndexHash {
    std::size_t operator()(const CellIndex& c) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t v : c) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

using CellSet = std::unordered_set<CellIndex, CellIndexHash>;

inline std::int64_t cell_coord(double x, double origin, double gamma) {
    return static_cast<std::int64_t>(std::ceil((x - origin) / gamma)) - 1;
}

inline CellIndex cell_of(const GridSpec& spec, std::span<const double> x) {
    if (x.size() != spec.dim)
        throw std::invalid_argument("cell_of: dimension mismatch");
    CellIndex idx(spec.dim);
    for (std::size_t j = 0; j < spec.dim; ++j)
        idx[j] = cell_coord(x[j], spec.origin[j], spec.gamma);
    return idx;
}

inline std::vector<double> cell_center(const GridSpec& spec, const CellIndex& c) {
    if (c.size() != spec.dim)
        throw std::invalid_argument("cell_center: dimension mismatch");
    std::vector<double> center(spec.dim);
    for (std::size_t j = 0; j < spec.dim; ++j)
        center[j] = spec.origin[j] + (static_cast<double>(c[j]) + 0.5) * spec.gamma;
    return center;
}

/// Empty cells adjacent (full 3^d - 1 Moore neighborhood) to at least one
/// occupied cell, in ascending lexicographic order.
inline std::vector<CellIndex> empty_adjacent_cells(const GridSpec& spec,
                                                   const CellSet& occupied) {
    if (occupied.empty())
        throw std::invalid_argument("empty_adjacent_cells: occupied set is empty");
    const std::size_t d = spec.dim;
    CellSet found;
    std::vector<int> off(d, -1);
    for (const CellIndex& c : occupied) {
        off.assign(d, -1);
        while (true) {
            bool all_zero = std::all_of(off.begin(), off.end(),
                                        [](int v) { return v == 0; });
            if (!all_zero) {
                CellIndex nbr(d);
                for (std::size_t j = 0; j < d; ++j) nbr[j] = c[j] + off[j];
                if (!occupied.contains(nbr)) found.insert(std::move(nbr));
            }
            // odometer over {-1,0,1}^d
            std::size_t j = 0;
            while (j < d && off[j] == 1) off[j++] = -1;
            if (j == d) break;
            ++off[j];
        }
    }
    std::vector<CellIndex> out(found.begin(), found.end());
    std::sort(out.begin(), out.end());
    return out;
}

/// Uniform bucket index over a dataset, cell side = query radius, so any
/// point within the radius of a query lies in the query's 3^d neighborhood.
/// Per-cell index lists are ascending.
class BucketGrid {
public:
    BucketGrid(const Dataset& ds, double side) : spec_(side, ds.dim()), n_(ds.size()) {
        for (std::size_t i = 0; i < ds.size(); ++i)
            cells_[cell_of(spec_, ds.x(i))].push_back(static_cast<std::uint32_t>(i));
    }

    const GridSpec& spec() const { return spec_; }
    std::size_t indexed_points() const { return n_; }

    /// Indices of points within `radius` of q, ascending. `out` is reused.
    void gather(const Dataset& ds, std::span<const double> q, double radius,
                std::vector<std::uint32_t>& out) const {
        out.clear();
        const std::size_t d = spec_.dim;
        const double r2 = radius * radius;
        CellIndex center = cell_of(spec_, q);
        CellIndex nbr(d);
        std::vector<int> off(d, -1);
        while (true) {
            for (std::size_t j = 0; j < d; ++j) nbr[j] = center[j] + off[j];
            auto it = cells_.find(nbr);
            if (it != cells_.end()) {
                for (std::uint32_t i : it->second)
                    if (sq_dist(ds.x(i), q) <= r2) out.push_back(i);
            }
            std::size_t j = 0;
            while (j < d && off[j] == 1) off[j++] = -1;
            if (j == d) break;
            ++off[j];
        }
        std::sort(out.begin(), out.end());
    }

private:
    GridSpec spec_;
    std::size_t n_;
    std::unordered_map<CellIndex, std::vector<std::uint32_t>, CellIndexHash> cells_;
};

}  // namespace kreg
