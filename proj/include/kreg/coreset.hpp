#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kreg/dataset.hpp"
#include "kreg/evaluate.hpp"
#include "kreg/grid.hpp"
#include "kreg/morton.hpp"
#include "kreg/rng.hpp"
#include "kreg/text.hpp"

namespace kreg {

enum class Method {
    RandomSample,
    KCenter,
    ZOrder,
    ZAggregate,
    Grid,
    GAggregate,
    AggregateNeighbor,
    ProgressiveGAggregate,
};

inline std::string_view method_name(Method m) {
    switch (m) {
        case Method::RandomSample: return "random-sample";
        case Method::KCenter: return "k-center";
        case Method::ZOrder: return "z-order";
        case Method::ZAggregate: return "z-aggregate";
        case Method::Grid: return "grid";
        case Method::GAggregate: return "g-aggregate";
        case Method::AggregateNeighbor: return "aggregate-neighbor";
        case Method::ProgressiveGAggregate: return "progressive-g-aggregate";
    }
    return "?";
}

inline std::string_view method_flag(Method m) {
    switch (m) {
        case Method::RandomSample: return "rs";
        case Method::KCenter: return "kcen";
        case Method::ZOrder: return "z";
        case Method::ZAggregate: return "za";
        case Method::Grid: return "g";
        case Method::GAggregate: return "ga";
        case Method::AggregateNeighbor: return "an";
        case Method::ProgressiveGAggregate: return "prog-ga";
    }
    return "?";
}

inline std::optional<Method> method_from_flag(std::string_view f) {
    for (Method m : {Method::RandomSample, Method::KCenter, Method::ZOrder,
                     Method::ZAggregate, Method::Grid, Method::GAggregate,
                     Method::AggregateNeighbor, Method::ProgressiveGAggregate})
        if (f == method_flag(m)) return m;
    return std::nullopt;
}

/// A weighted proxy dataset together with its construction provenance.
struct Coreset {
    Dataset data;
    Method method;
    std::vector<std::pair<std::string, std::string>> params;
    std::uint64_t seed = 0;
    std::uint64_t source_hash = 0;
};

// ---------------------------------------------------------------------------
// Theory-derived sizing helpers
// ---------------------------------------------------------------------------

/// ceil( (1/(eps^2 rho^2)) (d ln(1/rho) + ln(2/delta)) ), the uniform-sample
/// size sufficient for a (rho,eps)-coreset with probability 1-delta. The
/// leading constant is taken as 1; treat as an order-of-magnitude guide.
inline std::size_t sample_size_bound(double eps, double rho, double delta,
                                     std::size_t d) {
    if (!(eps > 0.0 && eps < 1.0) || !(rho > 0.0 && rho < 1.0) ||
        !(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("sample_size_bound: eps, rho, delta must be in (0,1)");
    double v = (1.0 / (eps * eps * rho * rho)) *
               (static_cast<double>(d) * std::log(1.0 / rho) + std::log(2.0 / delta));
    return static_cast<std::size_t>(std::ceil(v));
}

/// Cell side gamma = eps * sigma * rho / (8 sqrt(d)) for which the grid
/// methods give a (rho,eps)-coreset. Deliberately conservative.
inline double grid_gamma_for(double eps, double sigma, double rho, std::size_t d) {
    if (!(eps > 0.0 && eps < 1.0) || !(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("grid_gamma_for: eps and rho must be in (0,1)");
    if (!(sigma > 0.0) || d < 1)
        throw std::invalid_argument("grid_gamma_for: sigma must be > 0 and d >= 1");
    return eps * sigma * rho / (8.0 * std::sqrt(static_cast<double>(d)));
}

// ---------------------------------------------------------------------------
// Random sampling
// ---------------------------------------------------------------------------

/// Uniform sample of s distinct points without replacement, unit weights.
inline Coreset random_sample(const Dataset& P, std::size_t s, std::uint64_t seed) {
    const std::size_t n = P.size();
    if (s < 1 || s > n) throw std::invalid_argument("random_sample: size out of range");
    Rng rng(seed);
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    for (std::size_t i = 0; i < s; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(n - i));
        std::swap(idx[i], idx[j]);
    }
    const std::size_t d = P.dim();
    std::vector<double> xs, ys(s), ws(s, 1.0);
    xs.reserve(s * d);
    for (std::size_t i = 0; i < s; ++i) {
        auto xi = P.x(idx[i]);
        xs.insert(xs.end(), xi.begin(), xi.end());
        ys[i] = P.y(idx[i]);
    }
    return {Dataset(d, std::move(xs), std::move(ys), std::move(ws)),
            Method::RandomSample,
            {{"size", std::to_string(s)}},
            seed,
            dataset_hash(P)};
}

// ---------------------------------------------------------------------------
// k-Center (greedy Gonzalez) with per-class centroid aggregation
// ---------------------------------------------------------------------------

/// Greedy Gonzalez centers (seeded first pick, then farthest-point, ties to
/// the lowest index), with every input point assigned to its nearest center
/// (ties to the earliest center). Each nonempty class is emitted as its
/// weighted centroid carrying the class mass; keeping the center's own
/// coordinates instead of the centroid would be the main alternative here.
inline Coreset k_center(const Dataset& P, std::size_t k, std::uint64_t seed) {
    const std::size_t n = P.size();
    const std::size_t d = P.dim();
    if (k < 1 || k > n) throw std::invalid_argument("k_center: k out of range");
    Rng rng(seed);

    std::vector<std::uint32_t> centers;
    centers.reserve(k);
    centers.push_back(static_cast<std::uint32_t>(rng.uniform_int(n)));
    std::vector<double> min_d2(n);
    std::vector<std::uint32_t> nearest(n, 0);  // center rank, ties to lowest rank
    for (std::size_t i = 0; i < n; ++i) min_d2[i] = sq_dist(P.x(i), P.x(centers[0]));

    while (centers.size() < k) {
        std::size_t far = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i)
            if (min_d2[i] > best) {  // strict: ties keep the lowest index
                best = min_d2[i];
                far = i;
            }
        const std::uint32_t rank = static_cast<std::uint32_t>(centers.size());
        centers.push_back(static_cast<std::uint32_t>(far));
        for (std::size_t i = 0; i < n; ++i) {
            double d2 = sq_dist(P.x(i), P.x(far));
            if (d2 < min_d2[i]) {  // strict: ties keep the earlier center
                min_d2[i] = d2;
                nearest[i] = rank;
            }
        }
    }

    // Weighted centroid per nonempty class, ordered by center rank.
    std::vector<double> wsum(centers.size(), 0.0), ysum(centers.size(), 0.0);
    std::vector<double> xsum(centers.size() * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t c = nearest[i];
        double w = P.w(i);
        wsum[c] += w;
        ysum[c] += w * P.y(i);
        auto xi = P.x(i);
        for (std::size_t j = 0; j < d; ++j) xsum[c * d + j] += w * xi[j];
    }
    std::vector<double> xs, ys, ws;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (wsum[c] <= 0.0) continue;
        for (std::size_t j = 0; j < d; ++j) xs.push_back(xsum[c * d + j] / wsum[c]);
        ys.push_back(ysum[c] / wsum[c]);
        ws.push_back(wsum[c]);
    }
    return {Dataset(d, std::move(xs), std::move(ys), std::move(ws)),
            Method::KCenter,
            {{"k", std::to_string(k)}},
            seed,
            dataset_hash(P)};
}

// ---------------------------------------------------------------------------
// Sorting-based methods (Z-order curve)
// ---------------------------------------------------------------------------

/// Strided pick from the Z-sorted order: h = floor(|P|/s), one shared seeded
/// offset r in [0,h-1], indices r + h*(i-1). With per_block, an independent
/// offset is drawn for every block instead.
inline Coreset z_order_select(const Dataset& P, std::size_t s, std::uint64_t seed,
                              bool per_block = false) {
    const std::size_t n = P.size();
    if (s < 1 || s > n) throw std::invalid_argument("z_order_select: size out of range");
    auto perm = sort_by_zorder(P);
    const std::size_t h = n / s;
    Rng rng(seed);
    std::vector<std::size_t> picks(s);
    if (per_block) {
        for (std::size_t i = 0; i < s; ++i)
            picks[i] = h * i + static_cast<std::size_t>(rng.uniform_int(h));
    } else {
        const std::size_t r = (h > 1) ? static_cast<std::size_t>(rng.uniform_int(h)) : 0;
        for (std::size_t i = 0; i < s; ++i) picks[i] = r + h * i;
    }
    const std::size_t d = P.dim();
    std::vector<double> xs, ys(s), ws(s, 1.0);
    xs.reserve(s * d);
    for (std::size_t i = 0; i < s; ++i) {
        auto xi = P.x(perm[picks[i]]);
        xs.insert(xs.end(), xi.begin(), xi.end());
        ys[i] = P.y(perm[picks[i]]);
    }
    return {Dataset(d, std::move(xs), std::move(ys), std::move(ws)),
            Method::ZOrder,
            {{"size", std::to_string(s)}, {"per-block", per_block ? "1" : "0"}},
            seed,
            dataset_hash(P)};
}

/// Blockwise averages over the Z-sorted order: s consecutive blocks of
/// h = floor(|P|/s) points, the last block absorbing the remainder; each
/// block contributes (mean x, mean y) with weight = block weight.
inline Coreset z_aggregate(const Dataset& P, std::size_t s) {
    const std::size_t n = P.size();
    if (s < 1 || s > n) throw std::invalid_argument("z_aggregate: size out of range");
    auto perm = sort_by_zorder(P);
    const std::size_t h = n / s;
    const std::size_t d = P.dim();
    std::vector<double> xs, ys, ws;
    xs.reserve(s * d);
    for (std::size_t b = 0; b < s; ++b) {
        const std::size_t begin = b * h;
        const std::size_t end = (b + 1 == s) ? n : begin + h;
        double wsum = 0.0, ysum = 0.0;
        std::vector<double> xsum(d, 0.0);
        for (std::size_t i = begin; i < end; ++i) {
            std::uint32_t p = perm[i];
            double w = P.w(p);
            wsum += w;
            ysum += w * P.y(p);
            auto xi = P.x(p);
            for (std::size_t j = 0; j < d; ++j) xsum[j] += w * xi[j];
        }
        for (std::size_t j = 0; j < d; ++j) xs.push_back(xsum[j] / wsum);
        ys.push_back(ysum / wsum);
        ws.push_back(wsum);
    }
    return {Dataset(d, std::move(xs), std::move(ys), std::move(ws)),
            Method::ZAggregate,
            {{"size", std::to_string(s)}},
            0,
            dataset_hash(P)};
}

// ---------------------------------------------------------------------------
// Grid-based methods
// ---------------------------------------------------------------------------

namespace detail {

struct CellAgg {
    double wsum = 0.0;
    double ysum = 0.0;
    std::vector<double> xsum;
    std::vector<std::uint32_t> members;  // filled only when representatives are sampled
};

inline std::map<CellIndex, CellAgg> group_by_cell(const Dataset& P,
                                                  const GridSpec& spec,
                                                  bool keep_members) {
    std::map<CellIndex, CellAgg> cells;  // ordered: ascending lexicographic
    const std::size_t d = P.dim();
    for (std::size_t i = 0; i < P.size(); ++i) {
        auto xi = P.x(i);
        CellAgg& agg = cells[cell_of(spec, xi)];
        if (agg.xsum.empty()) agg.xsum.assign(d, 0.0);
        double w = P.w(i);
        agg.wsum += w;
        agg.ysum += w * P.y(i);
        for (std::size_t j = 0; j < d; ++j) agg.xsum[j] += w * xi[j];
        if (keep_members) agg.members.push_back(static_cast<std::uint32_t>(i));
    }
    return cells;
}

}  // namespace detail

/// One seeded representative point per nonempty cell, carrying the cell's
/// total weight. Output ordered by ascending cell index.
inline Coreset grid_select(const Dataset& P, double gamma, std::uint64_t seed,
                           std::vector<double> origin = {}) {
    GridSpec spec(gamma, P.dim(), std::move(origin));
    auto cells = detail::group_by_cell(P, spec, true);
    Rng rng(seed);
    const std::size_t d = P.dim();
    std::vector<double> xs, ys, ws;
    for (const auto& [cell, agg] : cells) {
        std::uint32_t pick = agg.members[rng.uniform_int(agg.members.size())];
        auto xi = P.x(pick);
        xs.insert(xs.end(), xi.begin(), xi.end());
        ys.push_back(P.y(pick));
        ws.push_back(agg.wsum);
    }
    return {Dataset(d, std::move(xs), std::move(ys), std::move(ws)),
            Method::Grid,
            {{"gamma", format_double_short(gamma)}},
            seed,
            dataset_hash(P)};
}

/// Weighted centroid (mean x, mean y, weight = cell weight) per nonempty
/// cell, ascending cell order. Deterministic.
inline Coreset g_aggregate(const Dataset& P, double gamma,
                           std::vector<double> origin = {}) {
    GridSpec spec(gamma, P.dim(), std::move(origin));
    auto cells = detail::group_by_cell(P, spec, false);
    const std::size_t d = P.dim();
    std::vector<double> xs, ys, ws;
    for (const auto& [cell, agg] : cells) {
        for (std::size_t j = 0; j < d; ++j) xs.push_back(agg.xsum[j] / agg.wsum);
        ys.push_back(agg.ysum / agg.wsum);
        ws.push_back(agg.wsum);
    }
    return {Dataset(d, std::move(xs), std::move(ys), std::move(ws)),
            Method::GAggregate,
            {{"gamma", format_double_short(gamma)}},
            0,
            dataset_hash(P)};
}

/// G-Aggregate plus, for every empty cell adjacent to an occupied one, a
/// unit-weight point at the cell center valued reg_P(center) over the full
/// input. Centers where the regression is undefined are skipped. The
/// centroid block comes first (ascending cells), then the added centers
/// (ascending cells).
inline Coreset aggregate_neighbor(const Dataset& P, double gamma,
                                  const EvalContext& ctx,
                                  std::vector<double> origin = {}) {
    GridSpec spec(gamma, P.dim(), std::move(origin));
    auto cells = detail::group_by_cell(P, spec, false);
    const std::size_t d = P.dim();
    std::vector<double> xs, ys, ws;
    for (const auto& [cell, agg] : cells) {
        for (std::size_t j = 0; j < d; ++j) xs.push_back(agg.xsum[j] / agg.wsum);
        ys.push_back(agg.ysum / agg.wsum);
        ws.push_back(agg.wsum);
    }
    CellSet occupied;
    for (const auto& [cell, agg] : cells) occupied.insert(cell);
    for (const CellIndex& cell : empty_adjacent_cells(spec, occupied)) {
        std::vector<double> center = cell_center(spec, cell);
        if (auto v = reg(P, ctx, center)) {
            xs.insert(xs.end(), center.begin(), center.end());
            ys.push_back(*v);
            ws.push_back(1.0);
        }
    }
    return {Dataset(d, std::move(xs), std::move(ys), std::move(ws)),
            Method::AggregateNeighbor,
            {{"gamma", format_double_short(gamma)},
             {"sigma", format_double_short(ctx.kernel.sigma())}},
            0,
            dataset_hash(P)};
}

// ---------------------------------------------------------------------------
// Progressive grid scheme (d = 1, time-like axis, now = 0)
// ---------------------------------------------------------------------------

/// Geometrically coarsening regions: region i has cell side
/// gamma_i = a^(i-1) gamma_1 and width a^(i-1) width_1, so every region holds
/// the same number of cells (width_1/gamma_1, which must be integral).
struct ProgressiveSpec {
    double gamma1 = 1.0;
    double width1 = 1.0;
    double a = 1.5;
    std::optional<std::size_t> region_count;  // absent: derived from the extent

    std::size_t cells_per_region() const {
        double r = width1 / gamma1;
        double rounded = std::round(r);
        if (!(gamma1 > 0.0) || !(width1 > 0.0) || !(a > 1.0))
            throw std::invalid_argument("ProgressiveSpec: need gamma1>0, width1>0, a>1");
        if (rounded < 1.0 || std::abs(r - rounded) > 1e-9 * r)
            throw std::invalid_argument("ProgressiveSpec: width1/gamma1 must be a positive integer");
        return static_cast<std::size_t>(rounded);
    }
};

/// Number of regions needed so every point of the window is strictly inside
/// the covered span (-coverage, 0].
inline std::size_t progressive_region_count(const ProgressiveSpec& spec, double span) {
    spec.cells_per_region();
    std::size_t r = 0;
    double coverage = 0.0, width = spec.width1;
    while (coverage <= span) {
        coverage += width;
        width *= spec.a;
        ++r;
        if (r > 4096) throw std::invalid_argument("progressive: window too wide for spec");
    }
    return r;
}

/// G-Aggregate per region with the region's resolution, anchored at the
/// region's right edge so region boundaries align with cell boundaries.
/// Regions tile (-coverage, 0] as half-open (lo, hi] spans, matching the
/// grid's cell convention; output is ordered oldest region first with
/// ascending cells, i.e. ascending x.
inline Coreset progressive_g_aggregate(const Dataset& P, const ProgressiveSpec& spec) {
    if (P.dim() != 1)
        throw std::invalid_argument("progressive_g_aggregate: requires d = 1");
    if (P.extent_hi()[0] > 0.0)
        throw std::invalid_argument(
            "progressive_g_aggregate: x-values must be <= 0 (shift so now = 0)");
    spec.cells_per_region();  // validates gamma1/width1/a

    const double span = -P.extent_lo()[0];
    std::size_t regions = spec.region_count ? *spec.region_count
                                            : progressive_region_count(spec, span);
    if (regions < 1) throw std::invalid_argument("progressive_g_aggregate: zero regions");

    // Region boundaries: region i covers (-(cov_{i}), -(cov_{i-1})].
    std::vector<double> cov(regions + 1, 0.0);
    double width = spec.width1;
    for (std::size_t i = 1; i <= regions; ++i) {
        cov[i] = cov[i - 1] + width;
        width *= spec.a;
    }
    if (P.extent_lo()[0] <= -cov[regions])
        throw std::invalid_argument(
            "progressive_g_aggregate: data extends beyond the covered window");

    // Bucket points into regions: region r covers (-cov[r+1], -cov[r]], so a
    // point with age -x lands in the last region whose cov is <= -x.
    std::vector<std::vector<std::uint32_t>> members(regions);
    for (std::size_t i = 0; i < P.size(); ++i) {
        double age = -P.x(i)[0];
        std::size_t r = static_cast<std::size_t>(
            std::upper_bound(cov.begin(), cov.end(), age) - cov.begin() - 1);
        members[r].push_back(static_cast<std::uint32_t>(i));
    }

    std::vector<double> xs, ys, ws;
    double gamma = spec.gamma1;
    std::vector<double> gammas(regions);
    for (std::size_t r = 0; r < regions; ++r) {
        gammas[r] = gamma;
        gamma *= spec.a;
    }
    for (std::size_t r = regions; r-- > 0;) {  // oldest first => ascending x
        if (members[r].empty()) continue;
        std::map<std::int64_t, detail::CellAgg> agg;
        for (std::uint32_t i : members[r]) {
            std::int64_t c = cell_coord(P.x(i)[0], -cov[r], gammas[r]);
            auto& a = agg[c];
            double w = P.w(i);
            if (a.xsum.empty()) a.xsum.assign(1, 0.0);
            a.wsum += w;
            a.ysum += w * P.y(i);
            a.xsum[0] += w * P.x(i)[0];
        }
        for (const auto& [c, a] : agg) {
            xs.push_back(a.xsum[0] / a.wsum);
            ys.push_back(a.ysum / a.wsum);
            ws.push_back(a.wsum);
        }
    }
    return {Dataset(1, std::move(xs), std::move(ys), std::move(ws)),
            Method::ProgressiveGAggregate,
            {{"gamma1", format_double_short(spec.gamma1)},
             {"width1", format_double_short(spec.width1)},
             {"a", format_double_short(spec.a)},
             {"regions", std::to_string(regions)}},
            0,
            dataset_hash(P)};
}

/// Occupied-cell count per region of a progressive coreset's source data;
/// used to verify the logarithmic size property.
inline std::vector<std::size_t> progressive_occupancy(const Dataset& P,
                                                      const ProgressiveSpec& spec) {
    Coreset cs = progressive_g_aggregate(P, spec);
    std::size_t regions = 0;
    for (const auto& [k, v] : cs.params)
        if (k == "regions") regions = static_cast<std::size_t>(*parse_int(v));
    std::vector<double> cov(regions + 1, 0.0);
    double width = spec.width1;
    for (std::size_t i = 1; i <= regions; ++i) {
        cov[i] = cov[i - 1] + width;
        width *= spec.a;
    }
    std::vector<std::size_t> occupied(regions, 0);
    for (std::size_t i = 0; i < cs.data.size(); ++i) {
        double age = -cs.data.x(i)[0];
        std::size_t r = static_cast<std::size_t>(
            std::upper_bound(cov.begin(), cov.end(), age) - cov.begin() - 1);
        if (r >= regions) r = regions - 1;  // centroid of the oldest cell can sit on the edge
        ++occupied[r];
    }
    return occupied;
}

}  // namespace kreg
