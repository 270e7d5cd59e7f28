#pragma once

// Parallel-beam acquisition: geometry, exact ray/pixel intersection lengths,
// the sparse row-wise system matrix and forward projection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "image.hpp"

namespace suprox {

/// Line {offset * n + t * d : t real} with d = (cos theta, sin theta) and
/// n = (-sin theta, cos theta). Theta is in radians.
struct Ray {
    double theta = 0.0;
    double offset = 0.0;
};

inline double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

struct ParallelGeometry {
    int num_views = 1;
    double angle_start_deg = 0.0;
    double angle_step_deg = 1.0;
    int num_rays = 1;
    double offset_min = -1.0;
    double offset_max = 1.0;

    std::size_t num_total_rays() const {
        return static_cast<std::size_t>(num_views) * static_cast<std::size_t>(num_rays);
    }
};

/// View-major list of rays: all offsets of view 0, then view 1, ...
/// A single ray per view sits at the midpoint of [offset_min, offset_max].
inline std::vector<Ray> make_parallel_geometry(const ParallelGeometry& g) {
    detail::require(g.num_views >= 1, "num_views must be positive");
    detail::require(g.num_rays >= 1, "num_rays must be positive");
    detail::require(g.angle_step_deg > 0.0, "angle_step must be positive");
    detail::require(std::isfinite(g.angle_start_deg) && std::isfinite(g.offset_min) &&
                        std::isfinite(g.offset_max) && g.offset_min <= g.offset_max,
                    "offset range must be finite and ordered");

    std::vector<Ray> rays;
    rays.reserve(g.num_total_rays());
    for (int v = 0; v < g.num_views; ++v) {
        const double theta = degrees_to_radians(g.angle_start_deg + v * g.angle_step_deg);
        for (int r = 0; r < g.num_rays; ++r) {
            double s = 0.5 * (g.offset_min + g.offset_max);
            if (g.num_rays > 1) {
                const double t = static_cast<double>(r) / static_cast<double>(g.num_rays - 1);
                s = (r == g.num_rays - 1) ? g.offset_max : g.offset_min + t * (g.offset_max - g.offset_min);
            }
            rays.push_back({theta, s});
        }
    }
    return rays;
}

/// One row a^i of the system matrix: strictly increasing pixel indices with
/// positive weights. The squared norm is cached at construction.
class SparseRow {
public:
    SparseRow() = default;

    SparseRow(std::vector<std::uint32_t> indices, std::vector<double> weights)
        : indices_(std::move(indices)), weights_(std::move(weights)) {
        detail::require(indices_.size() == weights_.size(), "sparse row: index/weight length mismatch");
        for (std::size_t k = 0; k < indices_.size(); ++k) {
            detail::require(k == 0 || indices_[k - 1] < indices_[k],
                            "sparse row: indices must be strictly increasing");
            detail::require(weights_[k] > 0.0 && std::isfinite(weights_[k]),
                            "sparse row: weights must be positive and finite");
            norm_sq_ += weights_[k] * weights_[k];
        }
    }

    std::span<const std::uint32_t> indices() const noexcept { return indices_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t nnz() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    double norm_squared() const noexcept { return norm_sq_; }
    double weight_sum() const noexcept {
        double s = 0.0;
        for (double w : weights_) s += w;
        return s;
    }

    double dot(std::span<const double> x) const noexcept {
        double s = 0.0;
        for (std::size_t k = 0; k < indices_.size(); ++k) s += weights_[k] * x[indices_[k]];
        return s;
    }

    friend bool operator==(const SparseRow&, const SparseRow&) = default;

private:
    std::vector<std::uint32_t> indices_;
    std::vector<double> weights_;
    double norm_sq_ = 0.0;
};

/// Clip a ray against [-1,1]^2. Returns the parameter interval [t0, t1] of
/// the chord, or an empty interval (t0 >= t1) on a miss.
inline std::pair<double, double> clip_to_square(const Ray& ray) {
    const double dx = std::cos(ray.theta), dy = std::sin(ray.theta);
    const double px = -ray.offset * dy, py = ray.offset * dx;
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    auto slab = [&](double p, double d) {
        if (std::abs(d) < 1e-15) {
            if (p < -1.0 || p > 1.0) t0 = t1 = 0.0;
            return;
        }
        double a = (-1.0 - p) / d, b = (1.0 - p) / d;
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
    };
    slab(px, dx);
    slab(py, dy);
    if (!(t1 > t0)) return {0.0, 0.0};
    return {t0, t1};
}

/// Exact intersection lengths of a line with every pixel it crosses
/// (Siddon-style traversal of the boundary crossings). A miss gives an
/// empty row.
inline SparseRow trace_ray(const Ray& ray, const Grid& grid) {
    grid.validate();
    detail::require(std::isfinite(ray.theta) && std::isfinite(ray.offset), "ray must be finite");

    const auto [t0, t1] = clip_to_square(ray);
    if (!(t1 > t0)) return {};

    const double dx = std::cos(ray.theta), dy = std::sin(ray.theta);
    const double px = -ray.offset * dy, py = ray.offset * dx;
    const double w = grid.pixel_width(), h = grid.pixel_height();

    std::vector<double> ts;
    ts.reserve(grid.rows + grid.cols + 4);
    ts.push_back(t0);
    ts.push_back(t1);
    if (std::abs(dx) >= 1e-15) {
        for (std::size_t j = 0; j <= grid.cols; ++j) {
            const double t = (-1.0 + static_cast<double>(j) * w - px) / dx;
            if (t > t0 && t < t1) ts.push_back(t);
        }
    }
    if (std::abs(dy) >= 1e-15) {
        for (std::size_t i = 0; i <= grid.rows; ++i) {
            const double t = (1.0 - static_cast<double>(i) * h - py) / dy;
            if (t > t0 && t < t1) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());

    std::vector<std::pair<std::uint32_t, double>> hits;
    hits.reserve(ts.size());
    const auto last_row = static_cast<double>(grid.rows - 1);
    const auto last_col = static_cast<double>(grid.cols - 1);
    for (std::size_t k = 1; k < ts.size(); ++k) {
        const double len = ts[k] - ts[k - 1];
        if (len <= 1e-13) continue;
        const double tm = 0.5 * (ts[k] + ts[k - 1]);
        const double mx = px + tm * dx, my = py + tm * dy;
        const double j = std::clamp(std::floor((mx + 1.0) / w), 0.0, last_col);
        const double i = std::clamp(std::floor((1.0 - my) / h), 0.0, last_row);
        hits.emplace_back(static_cast<std::uint32_t>(grid.flat(static_cast<std::size_t>(i),
                                                               static_cast<std::size_t>(j))),
                          len);
    }
    std::sort(hits.begin(), hits.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<std::uint32_t> idx;
    std::vector<double> wts;
    for (const auto& [pix, len] : hits) {
        if (!idx.empty() && idx.back() == pix) {
            wts.back() += len;
        } else {
            idx.push_back(pix);
            wts.push_back(len);
        }
    }
    return {std::move(idx), std::move(wts)};
}

/// Box constraint C0 = {x : lo <= x_i <= hi}.
struct Box {
    double lo = 0.0;
    double hi = 1.1;

    void validate() const {
        detail::require(std::isfinite(lo) && std::isfinite(hi), "box bounds must be finite");
        detail::require(lo <= hi, "box requires lo <= hi");
    }
};

/// The full feasibility description: rows of A, measurements b, box C0.
/// Immutable once measurements are attached; safe to share across threads.
class ProjectionSystem {
public:
    ProjectionSystem(Grid grid, std::vector<SparseRow> rows, Box box, std::vector<double> b = {})
        : grid_(grid), rows_(std::move(rows)), box_(box), b_(std::move(b)) {
        grid_.validate();
        box_.validate();
        if (b_.empty()) b_.assign(rows_.size(), 0.0);
        detail::require_dims(b_.size() == rows_.size(), "measurement length must equal row count");
        const std::size_t n = grid_.size();
        for (const auto& row : rows_) {
            detail::require_dims(row.empty() || row.indices().back() < n,
                                 "row index exceeds pixel count");
        }
    }

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<SparseRow>& rows() const noexcept { return rows_; }
    const SparseRow& row(std::size_t i) const noexcept { return rows_[i]; }
    std::span<const double> measurements() const noexcept { return b_; }
    const Box& box() const noexcept { return box_; }
    std::size_t num_rows() const noexcept { return rows_.size(); }
    std::size_t num_cols() const noexcept { return grid_.size(); }

    void set_measurements(std::vector<double> b) {
        detail::require_dims(b.size() == rows_.size(), "measurement length must equal row count");
        b_ = std::move(b);
    }

    void set_box(Box box) {
        box.validate();
        box_ = box;
    }

private:
    Grid grid_;
    std::vector<SparseRow> rows_;
    Box box_;
    std::vector<double> b_;
};

/// One row per ray in input order; misses stay as empty rows so row i
/// always corresponds to detector bin i.
inline ProjectionSystem build_system(std::span<const Ray> rays, const Grid& grid, Box box = {}) {
    detail::require(!rays.empty(), "build_system needs at least one ray");
    std::vector<SparseRow> rows;
    rows.reserve(rays.size());
    for (const auto& ray : rays) rows.push_back(trace_ray(ray, grid));
    return {grid, std::move(rows), box};
}

inline std::vector<double> forward_project(const ProjectionSystem& system, const Image& x) {
    detail::require_dims(x.grid() == system.grid(), "forward_project: image does not match system grid");
    std::vector<double> out(system.num_rows());
    const auto xv = x.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = system.row(i).dot(xv);
    return out;
}

/// b + eta with eta_i ~ N(0, variance) i.i.d.; reproducible for a fixed seed.
inline std::vector<double> add_noise(std::span<const double> b, double variance, std::uint64_t seed) {
    detail::require(variance >= 0.0 && std::isfinite(variance), "noise variance must be >= 0");
    std::vector<double> out(b.begin(), b.end());
    if (variance == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(variance));
    for (double& v : out) v += noise(rng);
    return out;
}

}  // namespace suprox
