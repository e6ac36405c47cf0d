#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kreg/coreset.hpp"
#include "kreg/dataset.hpp"
#include "kreg/evaluate.hpp"
#include "kreg/kernel.hpp"
#include "kreg/rng.hpp"

namespace kreg {

struct EmptyAdmissibleSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Box {
    std::vector<double> lo, hi;
    std::size_t dim() const { return lo.size(); }
};

inline Box data_domain(const Dataset& ds, double margin = 0.0) {
    Box b{ds.extent_lo(), ds.extent_hi()};
    for (std::size_t j = 0; j < b.lo.size(); ++j) {
        b.lo[j] -= margin;
        b.hi[j] += margin;
    }
    return b;
}

inline std::size_t default_eval_points(std::size_t d) {
    return d == 2 ? 512000 : 128000;
}

/// Uniform evaluation points in a box. Points are drawn sequentially from
/// one stream, so clouds of increasing size with the same seed are nested.
inline PointCloud sample_cloud(const Box& box, std::size_t n, std::uint64_t seed) {
    const std::size_t d = box.dim();
    PointCloud cloud{d, {}};
    cloud.coords.reserve(n * d);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            cloud.coords.push_back(rng.uniform(box.lo[j], box.hi[j]));
    return cloud;
}

struct EvalConfig {
    std::size_t n_points = 0;                  // 0: default by dimension
    std::optional<Box> domain;                 // absent: data extent +- margin
    double margin = 0.0;
    double rho = 0.0;                          // 0 disables the kde_P restriction
    std::uint64_t seed = 0;
    std::size_t repetitions = 10;
    std::optional<double> truncation_sigmas;   // absent: exact evaluation
    unsigned threads = 1;
};

struct ErrorReport {
    double linf = 0.0;             // mean of per-run maxima (single value if 1 run)
    double linf_normalized = 0.0;  // linf / M
    std::vector<double> argmax_q;
    double mean_abs = 0.0;
    std::size_t admissible_count = 0;
    std::size_t skipped_count = 0;
    std::vector<double> per_run_linf;
    double build_ms = 0.0;
    double query_ms_p = 0.0;
    double query_ms_s = 0.0;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace detail

/// Evaluates the reference regression once over a seeded cloud and compares
/// any number of proxies against it. Admissible points are those where
/// kde_P(q) >= rho and both regressions are defined.
class ErrorEvaluator {
public:
    ErrorEvaluator(const Dataset& P, const GaussianKernel& kernel, EvalConfig cfg)
        : p_(P), kernel_(kernel), cfg_(std::move(cfg)) {
        if (cfg_.n_points == 0) cfg_.n_points = default_eval_points(P.dim());
        Box box = cfg_.domain ? *cfg_.domain : data_domain(P, cfg_.margin);
        if (box.dim() != P.dim())
            throw std::invalid_argument("ErrorEvaluator: domain dimension mismatch");
        cloud_ = sample_cloud(box, cfg_.n_points, cfg_.seed);
        evaluate_reference();
    }

    /// Same, but over a caller-provided evaluation cloud.
    ErrorEvaluator(const Dataset& P, const GaussianKernel& kernel, EvalConfig cfg,
                   PointCloud cloud)
        : p_(P), kernel_(kernel), cfg_(std::move(cfg)) {
        if (cloud.d != P.dim())
            throw std::invalid_argument("ErrorEvaluator: cloud dimension mismatch");
        cloud_ = std::move(cloud);
        cfg_.n_points = cloud_.size();
        evaluate_reference();
    }

    const PointCloud& cloud() const { return cloud_; }
    const std::vector<KdePair>& reference_pairs() const { return pairs_p_; }
    const EvalConfig& config() const { return cfg_; }
    double query_ms_p() const { return query_ms_p_; }
    const Dataset& reference() const { return p_; }

    EvalContext make_context(const Dataset& ds) const {
        return cfg_.truncation_sigmas
                   ? truncated_context(kernel_, ds, *cfg_.truncation_sigmas)
                   : exact_context(kernel_);
    }

    /// Single-proxy comparison.
    ErrorReport evaluate(const Dataset& S) const {
        ErrorReport r = run(S);
        r.per_run_linf = {r.linf};
        finalize(r);
        return r;
    }

    /// Repeated comparison with a freshly built proxy per run: linf is the
    /// mean of the per-run maxima (seed-averaged), and the reported argmax
    /// comes from the worst run.
    ErrorReport evaluate(const std::function<Dataset(std::size_t rep)>& builder,
                         std::size_t repetitions) const {
        if (repetitions == 0)
            throw std::invalid_argument("ErrorEvaluator: repetitions must be >= 1");
        ErrorReport out;
        double linf_sum = 0.0, mean_sum = 0.0, build_sum = 0.0, query_sum = 0.0;
        double worst = -1.0;
        for (std::size_t rep = 0; rep < repetitions; ++rep) {
            auto t0 = detail::Clock::now();
            Dataset S = builder(rep);
            double built = detail::ms_since(t0);
            ErrorReport r = run(S);
            out.per_run_linf.push_back(r.linf);
            linf_sum += r.linf;
            mean_sum += r.mean_abs;
            build_sum += built;
            query_sum += r.query_ms_s;
            if (r.linf > worst) {
                worst = r.linf;
                out.argmax_q = r.argmax_q;
            }
            if (rep == 0) {
                out.admissible_count = r.admissible_count;
                out.skipped_count = r.skipped_count;
            }
        }
        out.linf = linf_sum / static_cast<double>(repetitions);
        out.mean_abs = mean_sum / static_cast<double>(repetitions);
        out.build_ms = build_sum / static_cast<double>(repetitions);
        out.query_ms_s = query_sum / static_cast<double>(repetitions);
        finalize(out);
        return out;
    }

private:
    void evaluate_reference() {
        EvalContext ctx_p = make_context(p_);
        auto t0 = detail::Clock::now();
        pairs_p_ = kde_wkde_batch(p_, ctx_p, cloud_, cfg_.threads);
        query_ms_p_ = detail::ms_since(t0);
    }

    ErrorReport run(const Dataset& S) const {
        if (S.dim() != p_.dim())
            throw std::invalid_argument("ErrorEvaluator: proxy dimension mismatch");
        ErrorReport r;
        EvalContext ctx_s = make_context(S);
        auto t0 = detail::Clock::now();
        auto pairs_s = kde_wkde_batch(S, ctx_s, cloud_, cfg_.threads);
        r.query_ms_s = detail::ms_since(t0);

        double max_err = -1.0, sum_err = 0.0;
        std::size_t argmax = 0, admissible = 0;
        for (std::size_t i = 0; i < cloud_.size(); ++i) {
            const KdePair& pp = pairs_p_[i];
            const KdePair& ps = pairs_s[i];
            if (pp.kde == 0.0 || pp.kde < cfg_.rho || ps.kde == 0.0) continue;
            double err = std::abs(pp.wkde / pp.kde - ps.wkde / ps.kde);
            sum_err += err;
            ++admissible;
            if (err > max_err) {
                max_err = err;
                argmax = i;
            }
        }
        if (admissible == 0)
            throw EmptyAdmissibleSet("no admissible evaluation points");
        r.linf = max_err;
        r.mean_abs = sum_err / static_cast<double>(admissible);
        auto q = cloud_[argmax];
        r.argmax_q.assign(q.begin(), q.end());
        r.admissible_count = admissible;
        r.skipped_count = cloud_.size() - admissible;
        return r;
    }

    void finalize(ErrorReport& r) const {
        double m = p_.max_y() - p_.min_y();
        r.linf_normalized = m > 0.0 ? r.linf / m : 0.0;
        r.query_ms_p = query_ms_p_;
    }

    const Dataset& p_;
    GaussianKernel kernel_;
    EvalConfig cfg_;
    PointCloud cloud_;
    std::vector<KdePair> pairs_p_;
    double query_ms_p_ = 0.0;
};

/// Max |reg_P - reg_S| over a seeded evaluation cloud, restricted to
/// admissible points.
inline ErrorReport linf_error(const Dataset& P, const Dataset& S,
                              const GaussianKernel& kernel, const EvalConfig& cfg) {
    return ErrorEvaluator(P, kernel, cfg).evaluate(S);
}

inline ErrorReport linf_error(const Dataset& P,
                              const std::function<Dataset(std::size_t)>& builder,
                              const GaussianKernel& kernel, const EvalConfig& cfg) {
    return ErrorEvaluator(P, kernel, cfg).evaluate(builder, cfg.repetitions);
}

/// Empirical epsilon-hat of the relative (rho,eps)-approximation property:
/// max |kde_P - kde_S| / max(kde_P, rho) over the cloud.
inline double check_relative_approx(const Dataset& P, const Dataset& S,
                                    const GaussianKernel& kernel, double rho,
                                    const EvalConfig& cfg) {
    ErrorEvaluator ev(P, kernel, cfg);
    auto pairs_s = kde_wkde_batch(S, ev.make_context(S), ev.cloud(), cfg.threads);
    const auto& pairs_p = ev.reference_pairs();
    double worst = 0.0;
    for (std::size_t i = 0; i < ev.cloud().size(); ++i) {
        double denom = std::max(pairs_p[i].kde, rho);
        double diff = std::abs(pairs_p[i].kde - pairs_s[i].kde);
        if (denom == 0.0) {
            if (diff > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        worst = std::max(worst, diff / denom);
    }
    return worst;
}

struct KrSufficiency {
    double alpha_hat = 0.0;  // relative kde error
    double beta_hat = 0.0;   // |wkde_P - wkde_S| / M
    double reg_linf = 0.0;   // over admissible points
    double bound = 0.0;      // 4 (alpha + beta/rho) M
    bool holds = false;
};

/// Measures the premises and conclusion of the sufficient condition
/// |reg_S - reg_P| <= 4 (alpha + beta/rho) M. The comparison carries a
/// 1e-12*M slack: when S reproduces P exactly both sides are rounding noise.
inline KrSufficiency check_kr_sufficient(const Dataset& P, const Dataset& S,
                                         const GaussianKernel& kernel, double rho,
                                         const EvalConfig& cfg) {
    if (!(rho > 0.0)) throw std::invalid_argument("check_kr_sufficient: rho must be > 0");
    ErrorEvaluator ev(P, kernel, cfg);
    auto pairs_s = kde_wkde_batch(S, ev.make_context(S), ev.cloud(), cfg.threads);
    const auto& pairs_p = ev.reference_pairs();
    const double m = P.max_y() - P.min_y();

    KrSufficiency out;
    for (std::size_t i = 0; i < ev.cloud().size(); ++i) {
        const KdePair& pp = pairs_p[i];
        const KdePair& ps = pairs_s[i];
        double kde_diff = std::abs(pp.kde - ps.kde);
        double denom = std::max(pp.kde, rho);
        out.alpha_hat = std::max(out.alpha_hat, kde_diff / denom);
        if (m > 0.0)
            out.beta_hat = std::max(out.beta_hat, std::abs(pp.wkde - ps.wkde) / m);
        if (pp.kde >= rho && pp.kde != 0.0 && ps.kde != 0.0)
            out.reg_linf = std::max(
                out.reg_linf, std::abs(pp.wkde / pp.kde - ps.wkde / ps.kde));
    }
    out.bound = 4.0 * (out.alpha_hat + out.beta_hat / rho) * m;
    double slack = 1e-12 * std::max(m, 1.0);
    out.holds = out.reg_linf <= out.bound + slack;
    return out;
}

/// Running maxima of |reg_P - reg_S| over nested prefixes of one seeded
/// cloud, at the given prefix sizes (ascending). Monotone by construction.
inline std::vector<double> convergence_curve(const Dataset& P, const Dataset& S,
                                             const GaussianKernel& kernel,
                                             const std::vector<std::size_t>& sizes,
                                             EvalConfig cfg) {
    if (sizes.empty() || !std::is_sorted(sizes.begin(), sizes.end()))
        throw std::invalid_argument("convergence_curve: sizes must be ascending");
    cfg.n_points = sizes.back();
    ErrorEvaluator ev(P, kernel, cfg);
    auto pairs_s = kde_wkde_batch(S, ev.make_context(S), ev.cloud(), cfg.threads);
    const auto& pairs_p = ev.reference_pairs();
    std::vector<double> out;
    double running = 0.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < ev.cloud().size(); ++i) {
        const KdePair& pp = pairs_p[i];
        const KdePair& ps = pairs_s[i];
        if (pp.kde != 0.0 && pp.kde >= cfg.rho && ps.kde != 0.0)
            running = std::max(running,
                               std::abs(pp.wkde / pp.kde - ps.wkde / ps.kde));
        while (next < sizes.size() && i + 1 == sizes[next]) {
            out.push_back(running);
            ++next;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Benchmark orchestration
// ---------------------------------------------------------------------------

struct BenchRow {
    std::string method;
    std::size_t size = 0;
    double build_ms = 0.0;
    double query_ms = 0.0;
    double linf = 0.0;
    double linf_norm = 0.0;
    bool failed = false;
    std::string error;
};

/// Maps a target coreset size onto a grid resolution: the longest extent
/// side divided by size^(1/d), which on evenly spread data yields about
/// `size` occupied cells.
inline double gamma_for_target_size(const Dataset& P, std::size_t size) {
    double side = 0.0;
    for (std::size_t j = 0; j < P.dim(); ++j)
        side = std::max(side, P.extent_hi()[j] - P.extent_lo()[j]);
    if (side <= 0.0) side = 1.0;
    double per_axis = std::pow(static_cast<double>(size),
                               1.0 / static_cast<double>(P.dim()));
    return side / per_axis;
}

/// Builds a coreset of roughly `size` points for the method, seeded where
/// the construction is randomized.
inline Coreset build_by_size(const Dataset& P, Method m, std::size_t size,
                             std::uint64_t seed, const EvalContext& ctx) {
    switch (m) {
        case Method::RandomSample: return random_sample(P, size, seed);
        case Method::KCenter: return k_center(P, size, seed);
        case Method::ZOrder: return z_order_select(P, size, seed);
        case Method::ZAggregate: return z_aggregate(P, size);
        case Method::Grid: return grid_select(P, gamma_for_target_size(P, size), seed);
        case Method::GAggregate: return g_aggregate(P, gamma_for_target_size(P, size));
        case Method::AggregateNeighbor:
            return aggregate_neighbor(P, gamma_for_target_size(P, size), ctx);
        case Method::ProgressiveGAggregate:
            throw std::invalid_argument("bench: progressive scheme has no size knob");
    }
    throw std::invalid_argument("bench: unknown method");
}

/// One row per (method, size): construction time (coreset + its query
/// index), query time over the evaluation cloud, and the seed-averaged linf
/// against the reference. A leading "org" row reports the reference's own
/// query time. Construction failures are reported per row.
inline std::vector<BenchRow> bench(const Dataset& P, const std::vector<Method>& methods,
                                   const std::vector<std::size_t>& sizes,
                                   const GaussianKernel& kernel, const EvalConfig& cfg) {
    ErrorEvaluator ev(P, kernel, cfg);
    std::vector<BenchRow> rows;
    {
        BenchRow org;
        org.method = "org";
        org.size = P.size();
        org.query_ms = ev.query_ms_p();
        rows.push_back(org);
    }
    for (Method m : methods) {
        for (std::size_t size : sizes) {
            BenchRow row;
            row.method = method_flag(m);
            row.size = size;
            try {
                EvalContext build_ctx = ev.make_context(P);
                std::size_t reps = cfg.repetitions == 0 ? 1 : cfg.repetitions;
                ErrorReport rep = ev.evaluate(
                    [&](std::size_t r) {
                        return build_by_size(P, m, size, cfg.seed + r, build_ctx).data;
                    },
                    reps);
                row.build_ms = rep.build_ms;
                row.query_ms = rep.query_ms_s;
                row.linf = rep.linf;
                row.linf_norm = rep.linf_normalized;
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace kreg
