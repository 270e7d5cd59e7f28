#pragma once

#include <cmath>
#include <span>

#include "errors.hpp"
#include "image.hpp"
#include "projector.hpp"

namespace suprox {

/// Res(x) = |Ax - b|_2, the distance-to-feasibility proxy of the driver.
inline double res(const Image& x, const ProjectionSystem& system) {
    detail::require_dims(x.grid() == system.grid(), "res: image does not match system grid");
    const auto b = system.measurements();
    const auto xv = x.values();
    double s = 0.0;
    for (std::size_t i = 0; i < system.num_rows(); ++i) {
        const double r = b[i] - system.row(i).dot(xv);
        s += r * r;
    }
    return std::sqrt(s);
}

/// Row-normalized distance sqrt(sum ((b_i - <a^i,x>) / |a^i|)^2); empty rows
/// are skipped. Reported as a metric only: it reacts badly to small
/// perturbations of x.
inline double dist_normalized(const Image& x, const ProjectionSystem& system) {
    detail::require_dims(x.grid() == system.grid(), "dist_normalized: image does not match system grid");
    const auto b = system.measurements();
    const auto xv = x.values();
    double s = 0.0;
    for (std::size_t i = 0; i < system.num_rows(); ++i) {
        const auto& row = system.row(i);
        if (row.empty()) continue;
        const double r = (b[i] - row.dot(xv)) / std::sqrt(row.norm_squared());
        s += r * r;
    }
    return std::sqrt(s);
}

/// Root-mean-square pixel error, sqrt(sum (x - x0)^2 / (K L)). Named MSE to
/// match the reporting convention of the tables it reproduces.
inline double mse(const Image& x, const Image& x0) {
    require_same_grid(x, x0, "mse");
    const double d = distance2(x.values(), x0.values());
    return std::sqrt(d * d / static_cast<double>(x.size()));
}

}  // namespace suprox
