#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "binary.hpp"
#include "errors.hpp"
#include "image.hpp"
#include "projector.hpp"

namespace suprox {

struct Ellipse {
    double cx = 0.0;
    double cy = 0.0;
    double a = 1.0;  // semi-axis along the rotated x direction
    double b = 1.0;
    double rotation_deg = 0.0;
    double intensity = 0.0;

    bool contains(double x, double y) const noexcept {
        const double phi = degrees_to_radians(rotation_deg);
        const double c = std::cos(phi), s = std::sin(phi);
        const double u = (x - cx) * c + (y - cy) * s;
        const double v = -(x - cx) * s + (y - cy) * c;
        return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
    }
};

/// The ten Shepp-Logan ellipses. Geometry and inner intensity deltas are the
/// 1974 values; the outer ellipse is normalized to 1 so the phantom spans
/// [0, 1] (skull 1.0, brain 0.02, small features 0.03).
inline const std::array<Ellipse, 10>& shepp_logan_ellipses() {
    static const std::array<Ellipse, 10> kEllipses = {{
        {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},
        {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.98},
        {0.22, 0.0, 0.11, 0.31, -18.0, -0.02},
        {-0.22, 0.0, 0.16, 0.41, 18.0, -0.02},
        {0.0, 0.35, 0.21, 0.25, 0.0, 0.01},
        {0.0, 0.1, 0.046, 0.046, 0.0, 0.01},
        {0.0, -0.1, 0.046, 0.046, 0.0, 0.01},
        {-0.08, -0.605, 0.046, 0.023, 0.0, 0.01},
        {0.0, -0.605, 0.023, 0.023, 0.0, 0.01},
        {0.06, -0.605, 0.023, 0.046, 0.0, 0.01},
    }};
    return kEllipses;
}

/// Sum of the intensities of every ellipse containing (x, y).
inline double ellipse_sum(std::span<const Ellipse> ellipses, double x, double y) {
    double v = 0.0;
    for (const auto& e : ellipses) {
        if (e.contains(x, y)) v += e.intensity;
    }
    return v;
}

inline Image rasterize(std::span<const Ellipse> ellipses, const Grid& grid) {
    for (const auto& e : ellipses) {
        detail::require(e.a > 0.0 && e.b > 0.0, "ellipse semi-axes must be positive");
    }
    Image img(grid);
    for (std::size_t i = 0; i < grid.rows; ++i) {
        const double y = grid.center_y(i);
        for (std::size_t j = 0; j < grid.cols; ++j) img(i, j) = ellipse_sum(ellipses, grid.center_x(j), y);
    }
    return img;
}

/// Pixel-center sampling of the Shepp-Logan phantom; sums are not clamped.
inline Image shepp_logan(std::size_t rows, std::size_t cols) {
    detail::require(rows >= 8 && cols >= 8, "shepp_logan needs at least 8x8 pixels");
    return rasterize(shepp_logan_ellipses(), Grid{rows, cols});
}

// SRIM: "SRIM", u32 K, u32 L, K*L little-endian f64, row-major.

inline constexpr char kImageMagic[4] = {'S', 'R', 'I', 'M'};

inline void save_image(const Image& image, const std::filesystem::path& path) {
    if (image.rows() > std::numeric_limits<std::uint32_t>::max() ||
        image.cols() > std::numeric_limits<std::uint32_t>::max()) {
        throw DimensionOverflow("image too large for SRIM header");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(kImageMagic, 4);
    detail::put_u32(out, static_cast<std::uint32_t>(image.rows()));
    detail::put_u32(out, static_cast<std::uint32_t>(image.cols()));
    for (double v : image.values()) detail::put_f64(out, v);
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

inline Image load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    char magic[4] = {};
    if (!in.read(magic, 4) || std::string(magic, 4) != std::string(kImageMagic, 4)) {
        throw MalformedFile("not an SRIM file: " + path.string());
    }
    std::uint32_t k = 0, l = 0;
    if (!detail::get_u32(in, k) || !detail::get_u32(in, l)) {
        throw MalformedFile("truncated SRIM header: " + path.string());
    }
    if (k == 0 || l == 0) throw MalformedFile("SRIM header has a zero dimension");

    const std::uint64_t count = static_cast<std::uint64_t>(k) * l;
    std::error_code ec;
    const auto bytes = std::filesystem::file_size(path, ec);
    if (ec) throw IoError("cannot stat: " + path.string());
    if (count > (std::numeric_limits<std::uint64_t>::max() - 12) / 8 ||
        count > std::numeric_limits<std::size_t>::max() / sizeof(double)) {
        throw DimensionOverflow("SRIM dimensions overflow");
    }
    if (bytes < 12 + count * 8) throw MalformedFile("SRIM payload truncated: " + path.string());
    if (bytes > 12 + count * 8) throw MalformedFile("SRIM payload has trailing bytes: " + path.string());

    std::vector<double> data(static_cast<std::size_t>(count));
    for (double& v : data) {
        if (!detail::get_f64(in, v)) throw MalformedFile("SRIM payload truncated: " + path.string());
    }
    return {Grid{k, l}, std::move(data)};
}

/// 8-bit binary PGM, values mapped affinely from [min, max] to [0, 255].
/// Export only.
inline void save_pgm(const Image& image, const std::filesystem::path& path) {
    const auto v = image.values();
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it, span = *hi_it - *lo_it;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    for (double x : v) {
        const double t = span > 0.0 ? (x - lo) / span : 0.0;
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0))));
    }
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

}  // namespace suprox
