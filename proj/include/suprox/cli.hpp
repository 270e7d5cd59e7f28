#pragma once

// Command-line front end: phantom, project, reconstruct, compare, info.
// Exit codes: 0 success, 1 usage error, 2 I/O or file-format error,
// 3 numeric/config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bench.hpp"
#include "driver.hpp"
#include "phantoms.hpp"
#include "system_io.hpp"

namespace suprox::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kNumeric = 3 };

namespace detail {

struct GeometryOpts {
    int views = 60;
    double angle_start = 0.0;
    double angle_step = 3.0;
    int rays = 201;
    double offset_min = -1.0;
    double offset_max = 1.0;

    void add(CLI::App* app) {
        app->add_option("--views", views, "number of projection directions")->capture_default_str();
        app->add_option("--angle-start", angle_start, "first view angle in degrees")->capture_default_str();
        app->add_option("--angle-step", angle_step, "angle increment in degrees")->capture_default_str();
        app->add_option("--rays", rays, "parallel rays per view")->capture_default_str();
        app->add_option("--offset-min", offset_min)->capture_default_str();
        app->add_option("--offset-max", offset_max)->capture_default_str();
    }

    ParallelGeometry geometry() const {
        return {views, angle_start, angle_step, rays, offset_min, offset_max};
    }
};

struct SolverOpts {
    std::string method = "tv-pps";
    double beta0 = 10.0;
    double gamma = 0.5;
    double eps = 0.01;
    std::optional<double> rel_eps;
    int max_outer = 300;
    int max_inner = 50;
    double tau = 0.12;
    int inner_iters = 50;
    double smoothing = 1e-8;
    double box_lo = 0.0;
    double box_hi = 1.1;

    void add(CLI::App* app, bool with_method) {
        if (with_method) {
            app->add_option("--method", method, "tv-pps, tv-s or art")
                ->check(CLI::IsMember({"tv-pps", "tv-s", "art"}))
                ->capture_default_str();
        }
        app->add_option("--beta0", beta0)->capture_default_str();
        app->add_option("--gamma", gamma)->capture_default_str();
        app->add_option("--eps", eps, "stop once Res < eps")->capture_default_str();
        app->add_option("--rel-eps", rel_eps, "stop once Res < rel-eps * |b| (overrides --eps)");
        app->add_option("--max-outer", max_outer)->capture_default_str();
        app->add_option("--max-inner", max_inner, "perturbation attempts per outer step")->capture_default_str();
        app->add_option("--tau", tau, "TV prox dual step")->capture_default_str();
        app->add_option("--inner-iters", inner_iters, "TV prox dual iterations")->capture_default_str();
        app->add_option("--smoothing", smoothing, "TV-S gradient smoothing")->capture_default_str();
        app->add_option("--box-lo", box_lo)->capture_default_str();
        app->add_option("--box-hi", box_hi)->capture_default_str();
    }

    SuperConfig base() const {
        SuperConfig c;
        c.beta0 = beta0;
        c.gamma = gamma;
        c.epsilon = eps;
        c.relative_epsilon = rel_eps;
        c.max_outer = max_outer;
        c.max_inner_attempts = max_inner;
        return c;
    }
    TVProxParams tv() const { return {tau, inner_iters}; }
    Box box() const { return {box_lo, box_hi}; }
};

inline std::string summary_line(const std::string& method, const RunResult& r) {
    std::ostringstream s;
    s << "method=" << method << " iterations=" << r.iterations << " res=" << format_real(r.final_res)
      << " mse=" << (r.final_mse ? format_real(*r.final_mse) : std::string("n/a"))
      << " runtime_s=" << format_real(r.elapsed) << " termination=" << to_string(r.reason);
    return s.str();
}

inline bool has_magic(const std::filesystem::path& path, const char (&magic)[4]) {
    std::ifstream in(path, std::ios::binary);
    char buf[4] = {};
    return in.read(buf, 4) && std::string(buf, 4) == std::string(magic, 4);
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"suprox: superiorized ART reconstruction toolkit"};
    app.set_config("--config", "", "key=value file; use [subcommand] sections, flags override");
    app.require_subcommand(1);

    // phantom
    auto* phantom_cmd = app.add_subcommand("phantom", "write a phantom image (SRIM)");
    std::vector<std::size_t> sl_size;
    std::string phantom_out, phantom_pgm;
    phantom_cmd->add_option("--shepp-logan", sl_size, "rows cols")->expected(2)->required();
    phantom_cmd->add_option("-o,--output", phantom_out, "SRIM output path")->required();
    phantom_cmd->add_option("--pgm", phantom_pgm, "also write an 8-bit PGM preview");

    // project
    auto* project_cmd = app.add_subcommand("project", "forward-project a phantom to a projection file");
    std::string project_in, project_out, project_system;
    detail::GeometryOpts project_geo;
    double noise_variance = 0.0;
    std::uint64_t noise_seed = 0;
    project_cmd->add_option("--phantom", project_in, "SRIM phantom")->required();
    project_cmd->add_option("-o,--output", project_out, "raw f64 output (sidecar at <path>.json)")->required();
    project_cmd->add_option("--system-out", project_system, "also dump the system matrix (SRSM)");
    project_cmd->add_option("--noise-variance", noise_variance)->capture_default_str();
    project_cmd->add_option("--seed", noise_seed)->capture_default_str();
    project_geo.add(project_cmd);

    // reconstruct
    auto* recon_cmd = app.add_subcommand("reconstruct", "run superiorized ART on a projection file");
    std::string recon_proj, recon_out, recon_history, recon_truth, recon_pgm, recon_profile_out;
    std::optional<std::size_t> recon_rows, recon_cols, recon_profile_col;
    detail::SolverOpts recon_solver;
    recon_cmd->add_option("--projections", recon_proj, "projection file written by `project`")->required();
    recon_cmd->add_option("-o,--output", recon_out, "SRIM reconstruction path");
    recon_cmd->add_option("--history", recon_history, "per-iteration CSV");
    recon_cmd->add_option("--ground-truth", recon_truth, "SRIM phantom for MSE tracking");
    recon_cmd->add_option("--pgm", recon_pgm, "PGM preview of the reconstruction");
    recon_cmd->add_option("--rows", recon_rows, "grid rows (default: from sidecar)");
    recon_cmd->add_option("--cols", recon_cols, "grid cols (default: from sidecar)");
    recon_cmd->add_option("--profile-column", recon_profile_col, "column for the difference profile");
    recon_cmd->add_option("--profile-out", recon_profile_out, "profile CSV (needs --ground-truth)");
    recon_solver.add(recon_cmd, true);

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "TV-S vs TV-PPS on identical simulated data");
    std::vector<std::size_t> cmp_sl;
    std::string cmp_phantom, cmp_dir;
    detail::GeometryOpts cmp_geo;
    detail::SolverOpts cmp_solver;
    double cmp_noise = 0.0;
    std::uint64_t cmp_seed = 0;
    std::optional<std::size_t> cmp_profile_col;
    bool cmp_histories = false;
    auto* cmp_sl_opt = compare_cmd->add_option("--shepp-logan", cmp_sl, "rows cols")->expected(2);
    auto* cmp_ph_opt = compare_cmd->add_option("--phantom", cmp_phantom, "SRIM phantom (e.g. external ghost phantom)");
    cmp_sl_opt->excludes(cmp_ph_opt);
    compare_cmd->add_option("--out-dir", cmp_dir, "output directory")->required();
    compare_cmd->add_option("--noise-variance", cmp_noise)->capture_default_str();
    compare_cmd->add_option("--seed", cmp_seed)->capture_default_str();
    compare_cmd->add_option("--profile-column", cmp_profile_col, "write central-profile CSVs for this column");
    compare_cmd->add_flag("--histories", cmp_histories, "also write per-method history CSVs (contain timings)");
    cmp_geo.add(compare_cmd);
    cmp_solver.add(compare_cmd, false);

    // info
    auto* info_cmd = app.add_subcommand("info", "describe an SRIM, SRSM or projection file");
    std::string info_path;
    info_cmd->add_option("path", info_path)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "FileError") {
            err << "error: " << e.what() << '\n';
            return kIo;
        }
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*phantom_cmd) {
            const Image img = shepp_logan(sl_size.at(0), sl_size.at(1));
            save_image(img, phantom_out);
            if (!phantom_pgm.empty()) save_pgm(img, phantom_pgm);
            out << "wrote " << phantom_out << " (" << img.rows() << "x" << img.cols() << ")\n";
        } else if (*project_cmd) {
            const Image img = load_image(project_in);
            std::optional<bench::NoiseSpec> noise;
            if (noise_variance != 0.0) noise = bench::NoiseSpec{noise_variance, noise_seed};
            auto data = bench::make_experiment_data(img, project_geo.geometry(), noise, Box{});
            data.meta.seed = noise_seed;
            write_projections(project_out, data.system.measurements(), data.meta);
            if (!project_system.empty()) write_system_matrix(project_system, data.system);
            out << "wrote " << project_out << " (m=" << data.meta.m << ")\n";
        } else if (*recon_cmd) {
            const Projections proj = read_projections(recon_proj);
            std::optional<Image> truth;
            if (!recon_truth.empty()) truth = load_image(recon_truth);
            const std::size_t rows = recon_rows.value_or(proj.meta.rows ? proj.meta.rows : (truth ? truth->rows() : 0));
            const std::size_t cols = recon_cols.value_or(proj.meta.cols ? proj.meta.cols : (truth ? truth->cols() : 0));
            const auto system = bench::system_from_projections(proj, Grid{rows, cols}, recon_solver.box());
            const auto method = bench::parse_method(recon_solver.method);
            const auto config = bench::method_config(method, recon_solver.base(), recon_solver.tv(), recon_solver.smoothing);
            const RunResult result = superiorize(system, Image(system.grid()), config, truth ? &*truth : nullptr);
            if (!recon_out.empty()) save_image(result.image, recon_out);
            if (!recon_pgm.empty()) save_pgm(result.image, recon_pgm);
            if (!recon_history.empty()) write_history_csv(recon_history, result.records);
            if (!recon_profile_out.empty()) {
                ::suprox::detail::require(truth.has_value(), "--profile-out needs --ground-truth");
                bench::write_profile_csv(recon_profile_out, result.image, *truth,
                                         recon_profile_col.value_or(result.image.cols() / 2));
            }
            out << detail::summary_line(recon_solver.method, result) << '\n';
        } else if (*compare_cmd) {
            bench::ExperimentSpec spec;
            if (!cmp_sl.empty()) spec.shepp_logan = std::pair{cmp_sl.at(0), cmp_sl.at(1)};
            if (!cmp_phantom.empty()) spec.phantom_path = cmp_phantom;
            spec.geometry = cmp_geo.geometry();
            if (cmp_noise != 0.0) spec.noise = bench::NoiseSpec{cmp_noise, cmp_seed};
            spec.box = cmp_solver.box();
            spec.config = cmp_solver.base();
            const Image truth = bench::load_phantom(spec);
            const auto data = bench::make_experiment_data(truth, spec.geometry, spec.noise, spec.box);
            const auto runs = bench::run_compare(data.system, truth, spec.config, cmp_solver.tv(), cmp_solver.smoothing);

            const std::filesystem::path dir(cmp_dir);
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec) throw IoError("cannot create output directory: " + dir.string());
            const double mse0 = mse(Image(truth.grid()), truth);
            bench::write_summary_csv(dir / "summary.csv", runs);
            bench::write_timing_csv(dir / "timing.csv", runs);
            for (const auto& r : runs) {
                const std::string name = bench::to_string(r.method);
                bench::write_mse_curve(dir / ("mse_curve_" + name + ".csv"), r.result, mse0);
                save_image(r.result.image, dir / ("recon_" + name + ".srim"));
                if (cmp_histories) write_history_csv(dir / ("history_" + name + ".csv"), r.result.records);
                if (cmp_profile_col) {
                    bench::write_profile_csv(dir / ("profile_" + name + ".csv"), r.result.image, truth, *cmp_profile_col);
                }
                out << detail::summary_line(name, r.result) << '\n';
            }
        } else if (*info_cmd) {
            const std::filesystem::path p(info_path);
            if (detail::has_magic(p, kImageMagic)) {
                const Image img = load_image(p);
                const auto v = img.values();
                const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
                out << "SRIM K=" << img.rows() << " L=" << img.cols() << " min=" << format_real(*lo)
                    << " max=" << format_real(*hi) << '\n';
            } else if (detail::has_magic(p, kSystemMagic)) {
                const auto sm = read_system_matrix(p);
                std::size_t nnz = 0;
                for (const auto& r : sm.rows) nnz += r.nnz();
                out << "SRSM m=" << sm.rows.size() << " n=" << sm.num_cols << " nnz=" << nnz << '\n';
            } else if (std::filesystem::exists(sidecar_path(p))) {
                const auto proj = read_projections(p);
                out << "projections m=" << proj.meta.m << " views=" << proj.meta.views
                    << " rays_per_view=" << proj.meta.rays_per_view << " angle_step_deg="
                    << format_real(proj.meta.angle_step_deg) << " noise_variance="
                    << format_real(proj.meta.noise_variance) << " seed=" << proj.meta.seed
                    << " grid=" << proj.meta.rows << "x" << proj.meta.cols << '\n';
            } else if (!std::filesystem::exists(p)) {
                throw IoError("no such file: " + p.string());
            } else {
                throw MalformedFile("unrecognized file: " + p.string());
            }
        }
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const MalformedFile& e) {
        err << "malformed file: " << e.what() << '\n';
        return kIo;
    } catch (const DimensionOverflow& e) {
        err << "dimension overflow: " << e.what() << '\n';
        return kIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumeric;
    }
    return kOk;
}

inline int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args);
}

}  // namespace suprox::cli
