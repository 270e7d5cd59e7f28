#pragma once

// Superiorization perturbations y = perturb(x, beta).
//
// The proximal kinds return argmin_y phi(y) + |y - x|^2 / (2 beta), which
// guarantees phi(y) <= phi(x). The classic kind steps a distance beta along
// the negative normalized gradient of a smoothed total variation.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "image.hpp"

namespace suprox {

namespace detail {

inline void require_beta(double beta) {
    require(beta > 0.0 && std::isfinite(beta), "beta must be positive and finite");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Closed-form proximal maps

/// Hard threshold at beta itself: keeps x_i when |x_i| > beta. Experimental:
/// |x|_0 is non-convex, so the convergence theory does not cover it.
inline Image prox_l0(Image x, double beta) {
    detail::require_beta(beta);
    for (double& v : x.values()) {
        if (!(std::abs(v) > beta)) v = 0.0;
    }
    return x;
}

/// Soft threshold: sign(x_i) max(|x_i| - beta, 0).
inline Image prox_l1(Image x, double beta) {
    detail::require_beta(beta);
    for (double& v : x.values()) {
        const double mag = std::abs(v) - beta;
        v = mag > 0.0 ? std::copysign(mag, v) : 0.0;
    }
    return x;
}

/// Prox of |x|^2 / 2: uniform shrinkage x / (1 + beta).
inline Image prox_l2(Image x, double beta) {
    detail::require_beta(beta);
    for (double& v : x.values()) v /= (1.0 + beta);
    return x;
}

// ---------------------------------------------------------------------------
// Total variation

/// Discrete TV over the interior lattice: sum over i < K-1, j < L-1 of
/// sqrt((x[i+1][j] - x[i][j])^2 + (x[i][j+1] - x[i][j])^2). The last row and
/// column contribute no terms of their own.
inline double tv_value(const Image& x) {
    detail::require(x.rows() >= 2 && x.cols() >= 2, "tv_value needs at least 2x2 pixels");
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < x.rows(); ++i) {
        for (std::size_t j = 0; j + 1 < x.cols(); ++j) {
            const double dv = x(i + 1, j) - x(i, j);
            const double dh = x(i, j + 1) - x(i, j);
            tv += std::sqrt(dv * dv + dh * dh);
        }
    }
    return tv;
}

/// Per-pixel 2-vector field: `rows` holds the component along i (down the
/// image), `cols` the component along j.
struct DualField {
    Grid grid;
    std::vector<double> rows;
    std::vector<double> cols;

    explicit DualField(Grid g) : grid(g), rows(g.size(), 0.0), cols(g.size(), 0.0) {}
};

/// Forward differences; the difference leaving the last row/column is 0.
inline void grad_into(std::span<const double> x, const Grid& g, DualField& out) {
    const std::size_t K = g.rows, L = g.cols;
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
            const std::size_t k = i * L + j;
            out.rows[k] = (i + 1 < K) ? x[k + L] - x[k] : 0.0;
            out.cols[k] = (j + 1 < L) ? x[k + 1] - x[k] : 0.0;
        }
    }
}

/// Negative adjoint of grad_into: <grad x, p> = -<x, div p>.
inline void div_into(const DualField& p, std::span<double> out) {
    const std::size_t K = p.grid.rows, L = p.grid.cols;
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
            const std::size_t k = i * L + j;
            double d = 0.0;
            if (i + 1 < K) d += p.rows[k];
            if (i > 0) d -= p.rows[k - L];
            if (j + 1 < L) d += p.cols[k];
            if (j > 0) d -= p.cols[k - 1];
            out[k] = d;
        }
    }
}

inline DualField grad(const Image& x) {
    DualField p(x.grid());
    grad_into(x.values(), x.grid(), p);
    return p;
}

inline Image div(const DualField& p) {
    detail::require_dims(p.rows.size() == p.grid.size() && p.cols.size() == p.grid.size(),
                         "div: field does not match its grid");
    Image out(p.grid);
    div_into(p, out.values());
    return out;
}

/// Isotropic TV consistent with grad: sum over all pixels of |grad x|.
/// Exceeds tv_value by the last-row and last-column difference terms.
inline double tv_isotropic(const Image& x) {
    double tv = 0.0;
    const std::size_t K = x.rows(), L = x.cols();
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
            const double dv = (i + 1 < K) ? x(i + 1, j) - x(i, j) : 0.0;
            const double dh = (j + 1 < L) ? x(i, j + 1) - x(i, j) : 0.0;
            tv += std::sqrt(dv * dv + dh * dh);
        }
    }
    return tv;
}

struct TVProxParams {
    double tau = 0.12;    // dual step, strictly inside (0, 1/8)
    int inner_iters = 50;  // dual iterations N

    void validate() const {
        detail::require(tau > 0.0 && tau < 0.125, "TV prox step tau must lie in (0, 1/8)");
        detail::require(inner_iters >= 1, "TV prox needs at least one dual iteration");
    }
};

/// psi(y) = TV(y) + |y - x|^2 / (2 beta), the functional prox_tv minimizes.
inline double prox_tv_objective(const Image& y, const Image& x, double beta) {
    require_same_grid(y, x, "prox_tv_objective");
    const double d = distance2(y.values(), x.values());
    return tv_isotropic(y) + d * d / (2.0 * beta);
}

/// Chambolle's dual fixed-point iteration for the TV prox, started from
/// p = 0 and run for exactly params.inner_iters steps:
///   p <- (p + tau g) / (1 + tau |g|),  g = grad(div p - x / beta)
/// and y = x - beta div p.
inline Image prox_tv(const Image& x, double beta, const TVProxParams& params = {}) {
    detail::require_beta(beta);
    params.validate();
    const Grid& g = x.grid();
    const std::size_t n = g.size();
    const auto xv = x.values();

    DualField p(g), gp(g);
    std::vector<double> work(n);
    const double inv_beta = 1.0 / beta;
    const double tau = params.tau;
    for (int s = 0; s < params.inner_iters; ++s) {
        div_into(p, work);
        for (std::size_t k = 0; k < n; ++k) work[k] -= xv[k] * inv_beta;
        grad_into(work, g, gp);
        for (std::size_t k = 0; k < n; ++k) {
            const double mag = std::hypot(gp.rows[k], gp.cols[k]);
            const double denom = 1.0 + tau * mag;
            p.rows[k] = (p.rows[k] + tau * gp.rows[k]) / denom;
            p.cols[k] = (p.cols[k] + tau * gp.cols[k]) / denom;
        }
    }
    div_into(p, work);
    Image y = x;
    auto yv = y.values();
    for (std::size_t k = 0; k < n; ++k) yv[k] -= beta * work[k];
    return y;
}

// ---------------------------------------------------------------------------
// Classic superiorization baseline

/// tv_value with sqrt(. + eps^2) inside every term.
inline double smoothed_tv_value(const Image& x, double eps) {
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < x.rows(); ++i) {
        for (std::size_t j = 0; j + 1 < x.cols(); ++j) {
            const double dv = x(i + 1, j) - x(i, j);
            const double dh = x(i, j + 1) - x(i, j);
            tv += std::sqrt(dv * dv + dh * dh + eps * eps);
        }
    }
    return tv;
}

inline Image smoothed_tv_gradient(const Image& x, double eps) {
    detail::require(x.rows() >= 2 && x.cols() >= 2, "smoothed TV needs at least 2x2 pixels");
    Image u(x.grid());
    for (std::size_t i = 0; i + 1 < x.rows(); ++i) {
        for (std::size_t j = 0; j + 1 < x.cols(); ++j) {
            const double dv = x(i + 1, j) - x(i, j);
            const double dh = x(i, j + 1) - x(i, j);
            if (dv == 0.0 && dh == 0.0) continue;
            const double r = std::sqrt(dv * dv + dh * dh + eps * eps);
            u(i, j) -= (dv + dh) / r;
            u(i + 1, j) += dv / r;
            u(i, j + 1) += dh / r;
        }
    }
    return u;
}

/// y = x - beta u / |u| with u the smoothed-TV gradient; y = x when u = 0.
inline Image classic_subgrad_perturb(Image x, double beta, double epsilon_smooth = 1e-8) {
    detail::require_beta(beta);
    detail::require(epsilon_smooth > 0.0, "smoothing epsilon must be positive");
    const Image u = smoothed_tv_gradient(x, epsilon_smooth);
    const double un = norm2(u.values());
    if (un == 0.0) return x;
    const double scale = beta / un;
    auto xv = x.values();
    const auto uv = u.values();
    for (std::size_t k = 0; k < xv.size(); ++k) xv[k] -= scale * uv[k];
    return x;
}

// ---------------------------------------------------------------------------
// Strategy dispatch

enum class PerturberKind { ProxL0, ProxL1, ProxL2, ProxTV, ClassicSubgradTV };

inline const char* to_string(PerturberKind k) {
    switch (k) {
        case PerturberKind::ProxL0: return "prox-l0";
        case PerturberKind::ProxL1: return "prox-l1";
        case PerturberKind::ProxL2: return "prox-l2";
        case PerturberKind::ProxTV: return "prox-tv";
        case PerturberKind::ClassicSubgradTV: return "classic-subgrad-tv";
    }
    return "?";
}

inline PerturberKind parse_perturber_kind(const std::string& name) {
    for (auto k : {PerturberKind::ProxL0, PerturberKind::ProxL1, PerturberKind::ProxL2,
                   PerturberKind::ProxTV, PerturberKind::ClassicSubgradTV}) {
        if (name == to_string(k)) return k;
    }
    throw InvalidArgument("unknown perturber kind: " + name);
}

struct Perturber {
    PerturberKind kind = PerturberKind::ProxTV;
    TVProxParams tv{};
    double smoothing = 1e-8;  // classic kind only

    bool is_prox() const noexcept { return kind != PerturberKind::ClassicSubgradTV; }

    void validate() const {
        if (kind == PerturberKind::ProxTV) tv.validate();
        if (kind == PerturberKind::ClassicSubgradTV) {
            detail::require(smoothing > 0.0, "smoothing epsilon must be positive");
        }
    }
};

/// The regularizer phi the perturber acts on. prox-tv uses the isotropic TV
/// it actually minimizes; the classic kind uses tv_value, whose smoothed
/// gradient it follows.
inline double objective(const Perturber& p, const Image& x) {
    switch (p.kind) {
        case PerturberKind::ProxL0: {
            double c = 0.0;
            for (double v : x.values()) c += (v != 0.0) ? 1.0 : 0.0;
            return c;
        }
        case PerturberKind::ProxL1: {
            double s = 0.0;
            for (double v : x.values()) s += std::abs(v);
            return s;
        }
        case PerturberKind::ProxL2: {
            const double n = norm2(x.values());
            return 0.5 * n * n;
        }
        case PerturberKind::ProxTV: return tv_isotropic(x);
        case PerturberKind::ClassicSubgradTV: return tv_value(x);
    }
    return 0.0;
}

inline Image perturb(const Perturber& p, const Image& x, double beta) {
    detail::require_beta(beta);
    p.validate();
    switch (p.kind) {
        case PerturberKind::ProxL0: return prox_l0(x, beta);
        case PerturberKind::ProxL1: return prox_l1(x, beta);
        case PerturberKind::ProxL2: return prox_l2(x, beta);
        case PerturberKind::ProxTV: return prox_tv(x, beta, p.tv);
        case PerturberKind::ClassicSubgradTV: return classic_subgrad_perturb(x, beta, p.smoothing);
    }
    return x;
}

}  // namespace suprox
