#pragma once

// Metric projections onto the hyperplanes C_i = {x : <a^i, x> = b_i} and the
// box C0, and the unrelaxed cyclic ART sweep P = P0 Pm ... P1.

#include <algorithm>
#include <span>

#include "errors.hpp"
#include "image.hpp"
#include "projector.hpp"

namespace suprox {

namespace detail {

inline void project_hyperplane_inplace(std::span<double> x, const SparseRow& row, double b_i) noexcept {
    if (row.empty() || !(row.norm_squared() > 0.0)) return;
    const double step = (b_i - row.dot(x)) / row.norm_squared();
    const auto idx = row.indices();
    const auto w = row.weights();
    for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] += step * w[k];
}

inline void project_box_inplace(std::span<double> x, double lo, double hi) noexcept {
    for (double& v : x) v = std::clamp(v, lo, hi);
}

inline void art_sweep_inplace(std::span<double> x, const ProjectionSystem& system) noexcept {
    const auto b = system.measurements();
    for (std::size_t i = 0; i < system.num_rows(); ++i) project_hyperplane_inplace(x, system.row(i), b[i]);
    project_box_inplace(x, system.box().lo, system.box().hi);
}

}  // namespace detail

/// P_i x = x + (b_i - <a^i,x>) / |a^i|^2 a^i. Empty rows leave x unchanged.
inline Image project_hyperplane(Image x, const SparseRow& row, double b_i) {
    detail::require_dims(row.empty() || row.indices().back() < x.size(),
                         "project_hyperplane: row index exceeds image size");
    detail::project_hyperplane_inplace(x.values(), row, b_i);
    return x;
}

inline Image project_box(Image x, double lo, double hi) {
    detail::require(lo <= hi, "project_box requires lo <= hi");
    detail::project_box_inplace(x.values(), lo, hi);
    return x;
}

/// Rows 1..m in detector order, then the box.
inline Image art_sweep(Image x, const ProjectionSystem& system) {
    detail::require_dims(x.grid() == system.grid(), "art_sweep: image does not match system grid");
    detail::art_sweep_inplace(x.values(), system);
    return x;
}

}  // namespace suprox
