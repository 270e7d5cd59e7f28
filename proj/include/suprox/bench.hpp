#pragma once

// Experiment plumbing shared by the CLI and the acceptance suite: phantom +
// projection data generation, the TV-S / TV-PPS / ART method presets, and
// the CSV artifacts of a comparison run.

#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "driver.hpp"
#include "errors.hpp"
#include "image.hpp"
#include "phantoms.hpp"
#include "projector.hpp"
#include "system_io.hpp"

namespace suprox::bench {

enum class Method { TvPps, TvS, Art };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::TvPps: return "tv-pps";
        case Method::TvS: return "tv-s";
        case Method::Art: return "art";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "tv-pps") return Method::TvPps;
    if (s == "tv-s") return Method::TvS;
    if (s == "art") return Method::Art;
    throw InvalidArgument("unknown method: " + s + " (expected tv-pps, tv-s or art)");
}

struct NoiseSpec {
    double variance = 0.0;
    std::uint64_t seed = 0;
};

struct ExperimentSpec {
    // Either a built-in Shepp-Logan size or an SRIM file.
    std::optional<std::pair<std::size_t, std::size_t>> shepp_logan;
    std::optional<std::filesystem::path> phantom_path;
    ParallelGeometry geometry{60, 0.0, 3.0, 201, -1.0, 1.0};
    std::optional<NoiseSpec> noise;
    Box box{};
    SuperConfig config{};  // perturber is overridden per method

    void validate() const {
        detail::require(shepp_logan.has_value() != phantom_path.has_value(),
                        "exactly one phantom source (built-in or file) must be given");
        box.validate();
    }
};

/// The configuration a method runs with: TV-PPS uses the prox-tv perturber,
/// TV-S the classic normalized subgradient, ART no perturbation at all.
inline SuperConfig method_config(Method m, SuperConfig base, const TVProxParams& tv = {},
                                 double smoothing = 1e-8) {
    switch (m) {
        case Method::TvPps: base.perturber = Perturber{PerturberKind::ProxTV, tv, smoothing}; break;
        case Method::TvS: base.perturber = Perturber{PerturberKind::ClassicSubgradTV, tv, smoothing}; break;
        case Method::Art: base.perturber.reset(); break;
    }
    return base;
}

struct ExperimentData {
    Image phantom;
    ProjectionSystem system;
    ProjectionMeta meta;
};

inline Image load_phantom(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.shepp_logan) return shepp_logan(spec.shepp_logan->first, spec.shepp_logan->second);
    return load_image(*spec.phantom_path);
}

inline ExperimentData make_experiment_data(const Image& phantom, const ParallelGeometry& geometry,
                                           const std::optional<NoiseSpec>& noise, Box box) {
    const auto rays = make_parallel_geometry(geometry);
    ProjectionSystem system = build_system(rays, phantom.grid(), box);
    auto b = forward_project(system, phantom);
    ProjectionMeta meta;
    meta.m = b.size();
    meta.views = geometry.num_views;
    meta.rays_per_view = geometry.num_rays;
    meta.angle_step_deg = geometry.angle_step_deg;
    meta.angle_start_deg = geometry.angle_start_deg;
    meta.offset_min = geometry.offset_min;
    meta.offset_max = geometry.offset_max;
    meta.rows = phantom.rows();
    meta.cols = phantom.cols();
    if (noise) {
        b = add_noise(b, noise->variance, noise->seed);
        meta.noise_variance = noise->variance;
        meta.seed = noise->seed;
    }
    system.set_measurements(std::move(b));
    return {phantom, std::move(system), meta};
}

/// Rebuilds the system a projection file was generated with.
inline ProjectionSystem system_from_projections(const Projections& proj, Grid grid, Box box) {
    const auto rays = make_parallel_geometry(proj.meta.geometry());
    detail::require_dims(rays.size() == proj.b.size(),
                         "projection sidecar geometry does not match its length");
    ProjectionSystem system = build_system(rays, grid, box);
    system.set_measurements(proj.b);
    return system;
}

struct MethodRun {
    Method method;
    RunResult result;
};

/// TV-S then TV-PPS on identical inputs. The runs share the immutable system
/// and execute concurrently.
inline std::vector<MethodRun> run_compare(const ProjectionSystem& system, const Image& truth,
                                          const SuperConfig& base, const TVProxParams& tv = {},
                                          double smoothing = 1e-8) {
    const Image x0(system.grid());
    auto launch = [&](Method m) {
        return std::async(std::launch::async, [&, m] {
            return superiorize(system, x0, method_config(m, base, tv, smoothing), &truth);
        });
    };
    auto classic = launch(Method::TvS);
    auto proposed = launch(Method::TvPps);
    std::vector<MethodRun> out;
    out.push_back({Method::TvS, classic.get()});
    out.push_back({Method::TvPps, proposed.get()});
    return out;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

// summary.csv holds only deterministic columns; wall-clock times go to
// timing.csv so re-runs reproduce summary and curves byte for byte.
inline void write_summary_csv(const std::filesystem::path& path, const std::vector<MethodRun>& runs) {
    auto out = open_out(path);
    out << "method,iterations,mse,res,termination\n";
    for (const auto& r : runs) {
        out << to_string(r.method) << ',' << r.result.iterations << ','
            << (r.result.final_mse ? format_real(*r.result.final_mse) : std::string()) << ','
            << format_real(r.result.final_res) << ',' << to_string(r.result.reason) << '\n';
    }
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

inline void write_timing_csv(const std::filesystem::path& path, const std::vector<MethodRun>& runs) {
    auto out = open_out(path);
    out << "method,runtime_s\n";
    for (const auto& r : runs) out << to_string(r.method) << ',' << format_real(r.result.elapsed) << '\n';
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

/// MSE against iteration number (k = 0 is the starting image).
inline void write_mse_curve(const std::filesystem::path& path, const RunResult& run, double mse0) {
    auto out = open_out(path);
    out << "k,mse\n0," << format_real(mse0) << '\n';
    for (const auto& rec : run.records) {
        out << rec.k + 1 << ',' << (rec.mse ? format_real(*rec.mse) : std::string()) << '\n';
    }
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

/// One image column against the ground truth, top to bottom.
inline void write_profile_csv(const std::filesystem::path& path, const Image& recon, const Image& truth,
                              std::size_t column) {
    require_same_grid(recon, truth, "profile");
    detail::require(column < recon.cols(), "profile column out of range");
    auto out = open_out(path);
    out << "row,reconstruction,truth,difference\n";
    for (std::size_t i = 0; i < recon.rows(); ++i) {
        out << i << ',' << format_real(recon(i, column)) << ',' << format_real(truth(i, column)) << ','
            << format_real(recon(i, column) - truth(i, column)) << '\n';
    }
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

}  // namespace suprox::bench
