#pragma once

// On-disk formats for the projector:
//   SRSM  - system matrix dump: "SRSM", u32 m, u32 n, then per row
//           u32 nnz followed by nnz x (u32 index, f64 weight); little-endian.
//   b     - raw little-endian f64 array, with a JSON sidecar at <path>.json.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "binary.hpp"
#include "errors.hpp"
#include "projector.hpp"

namespace suprox {

inline constexpr char kSystemMagic[4] = {'S', 'R', 'S', 'M'};

inline void write_system_matrix(const std::filesystem::path& path, const ProjectionSystem& system) {
    if (system.num_rows() > std::numeric_limits<std::uint32_t>::max() ||
        system.num_cols() > std::numeric_limits<std::uint32_t>::max()) {
        throw DimensionOverflow("system too large for SRSM u32 header");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(kSystemMagic, 4);
    detail::put_u32(out, static_cast<std::uint32_t>(system.num_rows()));
    detail::put_u32(out, static_cast<std::uint32_t>(system.num_cols()));
    for (const auto& row : system.rows()) {
        detail::put_u32(out, static_cast<std::uint32_t>(row.nnz()));
        for (std::size_t k = 0; k < row.nnz(); ++k) {
            detail::put_u32(out, row.indices()[k]);
            detail::put_f64(out, row.weights()[k]);
        }
    }
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

struct SystemMatrix {
    std::uint32_t num_cols = 0;
    std::vector<SparseRow> rows;
};

inline SystemMatrix read_system_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    char magic[4] = {};
    std::uint32_t m = 0, n = 0;
    if (!in.read(magic, 4) || std::string(magic, 4) != std::string(kSystemMagic, 4)) {
        throw MalformedFile("not an SRSM file: " + path.string());
    }
    if (!detail::get_u32(in, m) || !detail::get_u32(in, n)) {
        throw MalformedFile("truncated SRSM header: " + path.string());
    }
    SystemMatrix out{n, {}};
    out.rows.reserve(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        std::uint32_t nnz = 0;
        if (!detail::get_u32(in, nnz)) throw MalformedFile("truncated SRSM row header");
        if (nnz > n) throw MalformedFile("SRSM row has more entries than columns");
        std::vector<std::uint32_t> idx(nnz);
        std::vector<double> wts(nnz);
        for (std::uint32_t k = 0; k < nnz; ++k) {
            if (!detail::get_u32(in, idx[k]) || !detail::get_f64(in, wts[k])) {
                throw MalformedFile("truncated SRSM row payload");
            }
            if (idx[k] >= n) throw MalformedFile("SRSM index out of range");
        }
        try {
            out.rows.emplace_back(std::move(idx), std::move(wts));
        } catch (const InvalidArgument& e) {
            throw MalformedFile(std::string("SRSM row invalid: ") + e.what());
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) throw MalformedFile("trailing bytes after SRSM payload");
    return out;
}

/// Acquisition metadata stored next to a projection vector.
struct ProjectionMeta {
    std::size_t m = 0;
    int views = 0;
    int rays_per_view = 0;
    double angle_step_deg = 0.0;
    double noise_variance = 0.0;
    std::uint64_t seed = 0;
    // Needed to rebuild the system on load; not part of the minimal sidecar.
    double angle_start_deg = 0.0;
    double offset_min = -1.0;
    double offset_max = 1.0;
    std::size_t rows = 0;
    std::size_t cols = 0;

    ParallelGeometry geometry() const {
        return {views, angle_start_deg, angle_step_deg, rays_per_view, offset_min, offset_max};
    }
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    return path.string() + ".json";
}

inline nlohmann::ordered_json to_json(const ProjectionMeta& meta) {
    nlohmann::ordered_json j;
    j["m"] = meta.m;
    j["views"] = meta.views;
    j["rays_per_view"] = meta.rays_per_view;
    j["angle_step_deg"] = meta.angle_step_deg;
    j["noise_variance"] = meta.noise_variance;
    j["seed"] = meta.seed;
    j["angle_start_deg"] = meta.angle_start_deg;
    j["offset_min"] = meta.offset_min;
    j["offset_max"] = meta.offset_max;
    j["rows"] = meta.rows;
    j["cols"] = meta.cols;
    return j;
}

inline ProjectionMeta meta_from_json(const nlohmann::json& j) {
    ProjectionMeta meta;
    try {
        meta.m = j.at("m").get<std::size_t>();
        meta.views = j.at("views").get<int>();
        meta.rays_per_view = j.at("rays_per_view").get<int>();
        meta.angle_step_deg = j.at("angle_step_deg").get<double>();
        meta.noise_variance = j.at("noise_variance").get<double>();
        meta.seed = j.at("seed").get<std::uint64_t>();
        meta.angle_start_deg = j.value("angle_start_deg", 0.0);
        meta.offset_min = j.value("offset_min", -1.0);
        meta.offset_max = j.value("offset_max", 1.0);
        meta.rows = j.value("rows", std::size_t{0});
        meta.cols = j.value("cols", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw MalformedFile(std::string("projection sidecar: ") + e.what());
    }
    return meta;
}

inline void write_projections(const std::filesystem::path& path, std::span<const double> b,
                              const ProjectionMeta& meta) {
    detail::require_dims(b.size() == meta.m, "projection length does not match sidecar m");
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + path.string());
        for (double v : b) detail::put_f64(out, v);
        if (!out.flush()) throw IoError("write failed: " + path.string());
    }
    std::ofstream side(sidecar_path(path), std::ios::trunc);
    if (!side) throw IoError("cannot open for writing: " + sidecar_path(path).string());
    side << to_json(meta).dump(2) << '\n';
    if (!side.flush()) throw IoError("write failed: " + sidecar_path(path).string());
}

struct Projections {
    std::vector<double> b;
    ProjectionMeta meta;
};

inline Projections read_projections(const std::filesystem::path& path) {
    std::ifstream side(sidecar_path(path));
    if (!side) throw IoError("cannot open sidecar: " + sidecar_path(path).string());
    nlohmann::json j;
    try {
        side >> j;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedFile(std::string("projection sidecar: ") + e.what());
    }
    Projections out{{}, meta_from_json(j)};

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::error_code ec;
    const auto bytes = std::filesystem::file_size(path, ec);
    if (ec) throw IoError("cannot stat: " + path.string());
    if (bytes != out.meta.m * 8) throw MalformedFile("projection file length disagrees with sidecar m");
    out.b.resize(out.meta.m);
    for (double& v : out.b) {
        if (!detail::get_f64(in, v)) throw MalformedFile("truncated projection file");
    }
    return out;
}

}  // namespace suprox
