#pragma once

// Superiorized ART: the outer loop alternates y = perturb(x, beta) with
// x' = art_sweep(y), accepting only when phi(y) <= phi(x) and
// Res(x') < Res(x). Rejections shrink beta by gamma; every acceptance
// shrinks it once more, so the betas used sum to at most beta0 / (1 - gamma).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "feasibility.hpp"
#include "image.hpp"
#include "metrics.hpp"
#include "perturbation.hpp"
#include "projector.hpp"

namespace suprox {

struct SuperConfig {
    double beta0 = 10.0;
    double gamma = 0.5;
    double epsilon = 0.01;                   // stop once Res(x) < epsilon
    std::optional<double> relative_epsilon;  // if set, stop once Res(x) < relative_epsilon * |b|
    int max_outer = 300;
    int max_inner_attempts = 50;
    std::optional<Perturber> perturber = Perturber{};  // nullopt runs plain ART
    bool record_history = true;

    void validate() const {
        detail::require(beta0 > 0.0 && std::isfinite(beta0), "beta0 must be positive");
        detail::require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
        detail::require(epsilon >= 0.0, "epsilon must be >= 0");
        detail::require(!relative_epsilon || *relative_epsilon >= 0.0, "relative epsilon must be >= 0");
        detail::require(max_outer >= 1, "max_outer must be positive");
        detail::require(max_inner_attempts >= 1, "max_inner_attempts must be positive");
        if (perturber) perturber->validate();
    }
};

struct IterRecord {
    int k = 0;
    double beta_used = 0.0;  // 0 for unperturbed steps
    int inner_attempts = 0;
    double res = 0.0;        // Res(x^{k+1})
    double phi = 0.0;        // tv_value(x^{k+1}); NaN on grids below 2x2
    std::optional<double> mse;
    double perturb_norm = 0.0;  // |y^k - x^k|
    double elapsed = 0.0;       // seconds since the run started
    // Audit trail for the acceptance test; not part of the CSV.
    double res_before = 0.0;      // Res(x^k)
    double phi_before = 0.0;      // perturber objective at x^k
    double phi_perturbed = 0.0;   // perturber objective at y^k
    bool fallback = false;        // unperturbed step taken after exhausting attempts
};

enum class Termination { ResThreshold, MaxOuter, Stall };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::ResThreshold: return "res-threshold";
        case Termination::MaxOuter: return "max-outer";
        case Termination::Stall: return "inner-exhausted-fallback-stall";
    }
    return "?";
}

struct RunResult {
    Image image;
    std::vector<IterRecord> records;
    Termination reason = Termination::MaxOuter;
    int iterations = 0;
    double final_res = 0.0;
    std::optional<double> final_mse;
    double elapsed = 0.0;
};

inline double tv_or_nan(const Image& x) {
    return (x.rows() >= 2 && x.cols() >= 2) ? tv_value(x) : std::numeric_limits<double>::quiet_NaN();
}

inline RunResult superiorize(const ProjectionSystem& system, const Image& x0, const SuperConfig& config,
                             const Image* ground_truth = nullptr) {
    config.validate();
    detail::require_dims(x0.grid() == system.grid(), "superiorize: x0 does not match system grid");
    if (ground_truth) require_same_grid(*ground_truth, x0, "superiorize ground truth");

    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    auto seconds = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    const double threshold = config.relative_epsilon
                                 ? *config.relative_epsilon * norm2(system.measurements())
                                 : config.epsilon;

    RunResult out{x0, {}, Termination::MaxOuter, 0, 0.0, std::nullopt, 0.0};
    Image& x = out.image;
    double res_x = res(x, system);
    double beta = config.beta0;

    int k = 0;
    for (;; ++k) {
        if (res_x < threshold) {
            out.reason = Termination::ResThreshold;
            break;
        }
        if (k >= config.max_outer) {
            out.reason = Termination::MaxOuter;
            break;
        }

        IterRecord rec;
        rec.k = k;
        rec.res_before = res_x;
        std::optional<Image> next;
        double res_next = 0.0;

        if (config.perturber) {
            const Perturber& pert = *config.perturber;
            const double phi_x = objective(pert, x);
            rec.phi_before = phi_x;
            for (int attempt = 1; attempt <= config.max_inner_attempts; ++attempt) {
                rec.inner_attempts = attempt;
                Image y = perturb(pert, x, beta);
                const double phi_y = objective(pert, y);
                Image cand = art_sweep(y, system);
                const double res_cand = res(cand, system);
                if (phi_y <= phi_x && res_cand < res_x) {
                    rec.beta_used = beta;
                    rec.perturb_norm = distance2(y.values(), x.values());
                    rec.phi_perturbed = phi_y;
                    next = std::move(cand);
                    res_next = res_cand;
                    beta *= config.gamma;
                    break;
                }
                beta *= config.gamma;
            }
        }

        if (!next) {
            Image cand = art_sweep(x, system);
            const double res_cand = res(cand, system);
            if (!(res_cand < res_x)) {
                out.reason = Termination::Stall;
                break;
            }
            rec.fallback = config.perturber.has_value();
            rec.phi_perturbed = rec.phi_before;
            next = std::move(cand);
            res_next = res_cand;
        }

        x = std::move(*next);
        res_x = res_next;
        rec.res = res_x;
        rec.phi = tv_or_nan(x);
        if (ground_truth) rec.mse = mse(x, *ground_truth);
        rec.elapsed = seconds();
        if (config.record_history) out.records.push_back(rec);
    }

    out.iterations = k;
    out.final_res = res_x;
    if (ground_truth) out.final_mse = mse(x, *ground_truth);
    out.elapsed = seconds();
    return out;
}

// History CSV: one row per outer iteration, '.' decimals, LF line ends.

inline constexpr const char* kHistoryHeader = "k,beta_used,inner_attempts,res,phi,mse,perturb_norm,elapsed_s";

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_history_csv(std::ostream& out, const std::vector<IterRecord>& records) {
    out << kHistoryHeader << '\n';
    for (const auto& r : records) {
        out << r.k << ',' << format_real(r.beta_used) << ',' << r.inner_attempts << ','
            << format_real(r.res) << ',' << format_real(r.phi) << ','
            << (r.mse ? format_real(*r.mse) : std::string()) << ',' << format_real(r.perturb_norm)
            << ',' << format_real(r.elapsed) << '\n';
    }
}

inline void write_history_csv(const std::filesystem::path& path, const std::vector<IterRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    write_history_csv(out, records);
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

}  // namespace suprox
