#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "kreg/dataset.hpp"
#include "kreg/grid.hpp"
#include "kreg/kernel.hpp"

namespace kreg {

/// How kde/wkde/reg sums are evaluated: exactly over all points, or over a
/// bucket index restricted to points within `radius` of the query.
struct EvalContext {
    GaussianKernel kernel;
    std::optional<double> radius;              // absent = exact evaluation
    std::shared_ptr<const BucketGrid> index;   // built over the target dataset

    bool truncated() const { return radius.has_value(); }
};

inline EvalContext exact_context(const GaussianKernel& k) { return {k, {}, {}}; }

/// Truncated context over `ds` with radius = radius_in_sigmas * sigma
/// (default ten bandwidths). The bucket cell side equals the radius.
inline EvalContext truncated_context(const GaussianKernel& k, const Dataset& ds,
                                     double radius_in_sigmas = 10.0) {
    double radius = radius_in_sigmas * k.sigma();
    if (!(radius >= k.sigma()))
        throw std::invalid_argument("truncated_context: radius must be >= sigma");
    return {k, radius, std::make_shared<BucketGrid>(ds, radius)};
}

/// Normalized kernel sums at one query: kde = (1/W) sum w_i K(x_i,q) and
/// wkde = (1/W) sum w_i K(x_i,q) y_i.
struct KdePair {
    double kde = 0.0;
    double wkde = 0.0;
};

namespace detail {

inline KdePair accumulate(const Dataset& ds, const EvalContext& ctx,
                          std::span<const double> q,
                          std::vector<std::uint32_t>& scratch) {
    if (q.size() != ds.dim())
        throw std::invalid_argument("evaluate: query dimension mismatch");
    const std::size_t d = ds.dim();
    const double* coords = ds.coords().data();
    const double* ys = ds.ys().data();
    const double* ws = ds.ws().data();
    double acc_k = 0.0, acc_wk = 0.0;
    auto add = [&](std::size_t i) {
        double d2 = 0.0;
        const double* xi = coords + i * d;
        for (std::size_t j = 0; j < d; ++j) {
            double t = xi[j] - q[j];
            d2 += t * t;
        }
        double k = ws[i] * ctx.kernel.at_sq_dist(d2);
        acc_k += k;
        acc_wk += k * ys[i];
    };
    if (ctx.truncated()) {
        if (!ctx.index || ctx.index->indexed_points() != ds.size())
            throw std::invalid_argument("evaluate: context index does not match dataset");
        ctx.index->gather(ds, q, *ctx.radius, scratch);
        for (std::uint32_t i : scratch) add(i);
    } else {
        for (std::size_t i = 0; i < ds.size(); ++i) add(i);
    }
    return {acc_k / ds.total_weight(), acc_wk / ds.total_weight()};
}

}  // namespace detail

inline KdePair kde_wkde(const Dataset& ds, const EvalContext& ctx,
                        std::span<const double> q) {
    std::vector<std::uint32_t> scratch;
    return detail::accumulate(ds, ctx, q, scratch);
}

inline double kde(const Dataset& ds, const EvalContext& ctx,
                  std::span<const double> q) {
    return kde_wkde(ds, ctx, q).kde;
}

inline double wkde(const Dataset& ds, const EvalContext& ctx,
                   std::span<const double> q) {
    return kde_wkde(ds, ctx, q).wkde;
}

/// Nadaraya-Watson regression wkde/kde; empty when the kde is exactly zero
/// (total truncation or underflow), in which case callers skip the query.
inline std::optional<double> reg(const Dataset& ds, const EvalContext& ctx,
                                 std::span<const double> q) {
    KdePair p = kde_wkde(ds, ctx, q);
    if (p.kde == 0.0) return std::nullopt;
    return p.wkde / p.kde;
}

/// Batched kernel sums over a query cloud. Queries are independent; with
/// threads > 1 they are split into contiguous chunks. Within one query the
/// summation order is fixed (ascending point index), so results are
/// identical for every thread count.
inline std::vector<KdePair> kde_wkde_batch(const Dataset& ds, const EvalContext& ctx,
                                           const PointCloud& queries,
                                           unsigned threads = 1) {
    const std::size_t n = queries.size();
    std::vector<KdePair> out(n);
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || n < 2 * static_cast<std::size_t>(threads)) {
        std::vector<std::uint32_t> scratch;
        for (std::size_t i = 0; i < n; ++i)
            out[i] = detail::accumulate(ds, ctx, queries[i], scratch);
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t b = t * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e] {
            std::vector<std::uint32_t> scratch;
            for (std::size_t i = b; i < e; ++i)
                out[i] = detail::accumulate(ds, ctx, queries[i], scratch);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

/// Elementwise regression over a query cloud; order matches the input.
inline std::vector<std::optional<double>> reg_batch(const Dataset& ds,
                                                    const EvalContext& ctx,
                                                    const PointCloud& queries,
                                                    unsigned threads = 1) {
    auto pairs = kde_wkde_batch(ds, ctx, queries, threads);
    std::vector<std::optional<double>> out(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i].kde != 0.0) out[i] = pairs[i].wkde / pairs[i].kde;
    return out;
}

}  // namespace kreg
