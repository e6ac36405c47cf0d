#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kreg {

/// A d-dimensional location, scalar value and positive multiplicity weight.
struct WeightedPoint {
    std::vector<double> x;
    double y = 0.0;
    double w = 1.0;
};

/// A bare set of query locations (row-major, no values or weights).
struct PointCloud {
    std::size_t d = 1;
    std::vector<double> coords;

    std::size_t size() const { return d == 0 ? 0 : coords.size() / d; }
    std::span<const double> operator[](std::size_t i) const {
        return {coords.data() + i * d, d};
    }
};

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double t = a[j] - b[j];
        s += t * t;
    }
    return s;
}

/// Immutable weighted point set with cached statistics (value range, extent,
/// total weight). Stored column-agnostic as flat arrays so evaluation loops
/// stream through memory.
class Dataset {
public:
    Dataset(std::size_t d, std::vector<double> coords, std::vector<double> ys,
            std::vector<double> ws)
        : d_(d),
          coords_(std::move(coords)),
          ys_(std::move(ys)),
          ws_(std::move(ws)) {
        validate();
        cache_stats();
    }

    explicit Dataset(const std::vector<WeightedPoint>& pts) {
        if (pts.empty()) throw std::invalid_argument("Dataset: empty point set");
        d_ = pts.front().x.size();
        coords_.reserve(pts.size() * d_);
        ys_.reserve(pts.size());
        ws_.reserve(pts.size());
        for (const auto& p : pts) {
            if (p.x.size() != d_)
                throw std::invalid_argument("Dataset: mixed dimensions");
            coords_.insert(coords_.end(), p.x.begin(), p.x.end());
            ys_.push_back(p.y);
            ws_.push_back(p.w);
        }
        validate();
        cache_stats();
    }

    std::size_t size() const { return ys_.size(); }
    std::size_t dim() const { return d_; }

    std::span<const double> x(std::size_t i) const {
        return {coords_.data() + i * d_, d_};
    }
    double y(std::size_t i) const { return ys_[i]; }
    double w(std::size_t i) const { return ws_[i]; }

    const std::vector<double>& coords() const { return coords_; }
    const std::vector<double>& ys() const { return ys_; }
    const std::vector<double>& ws() const { return ws_; }

    double total_weight() const { return total_weight_; }
    double min_y() const { return min_y_; }
    double max_y() const { return max_y_; }
    const std::vector<double>& extent_lo() const { return lo_; }
    const std::vector<double>& extent_hi() const { return hi_; }

    WeightedPoint point(std::size_t i) const {
        auto xi = x(i);
        return {std::vector<double>(xi.begin(), xi.end()), ys_[i], ws_[i]};
    }

private:
    void validate() const {
        if (d_ == 0) throw std::invalid_argument("Dataset: dimension must be >= 1");
        if (ys_.empty()) throw std::invalid_argument("Dataset: empty point set");
        if (coords_.size() != ys_.size() * d_ || ws_.size() != ys_.size())
            throw std::invalid_argument("Dataset: inconsistent array sizes");
        for (double c : coords_)
            if (!std::isfinite(c))
                throw std::invalid_argument("Dataset: non-finite coordinate");
        for (double v : ys_)
            if (!std::isfinite(v))
                throw std::invalid_argument("Dataset: non-finite value");
        for (double v : ws_)
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("Dataset: weights must be positive");
    }

    void cache_stats() {
        min_y_ = *std::min_element(ys_.begin(), ys_.end());
        max_y_ = *std::max_element(ys_.begin(), ys_.end());
        lo_.assign(d_, std::numeric_limits<double>::infinity());
        hi_.assign(d_, -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < size(); ++i) {
            auto xi = x(i);
            for (std::size_t j = 0; j < d_; ++j) {
                lo_[j] = std::min(lo_[j], xi[j]);
                hi_[j] = std::max(hi_[j], xi[j]);
            }
        }
        total_weight_ = 0.0;
        for (double v : ws_) total_weight_ += v;
    }

    std::size_t d_ = 0;
    std::vector<double> coords_;
    std::vector<double> ys_;
    std::vector<double> ws_;
    double min_y_ = 0.0, max_y_ = 0.0, total_weight_ = 0.0;
    std::vector<double> lo_, hi_;
};

/// Summary quantities used by the error model: M (value range), the
/// bounding-box extent, its diagonal as a diameter upper bound (exact for
/// d=1), and delta = diameter / sigma.
struct DatasetStats {
    double m_range = 0.0;
    std::vector<double> lo, hi;
    double diameter = 0.0;
    double delta = 0.0;
};

inline DatasetStats stats(const Dataset& ds, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("stats: sigma must be > 0");
    DatasetStats s;
    s.m_range = ds.max_y() - ds.min_y();
    s.lo = ds.extent_lo();
    s.hi = ds.extent_hi();
    double sq = 0.0;
    for (std::size_t j = 0; j < ds.dim(); ++j) {
        double t = s.hi[j] - s.lo[j];
        sq += t * t;
    }
    s.diameter = std::sqrt(sq);
    s.delta = s.diameter / sigma;
    return s;
}

/// FNV-1a over the raw bit patterns of the points, for provenance records.
inline std::uint64_t dataset_hash(const Dataset& ds) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(ds.dim());
    mix(ds.size());
    for (double c : ds.coords()) mix(std::bit_cast<std::uint64_t>(c));
    for (double v : ds.ys()) mix(std::bit_cast<std::uint64_t>(v));
    for (double v : ds.ws()) mix(std::bit_cast<std::uint64_t>(v));
    return h;
}

}  // namespace kreg
