#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace suprox {

/// K x L pixel lattice covering the square [-1,1]^2.
///
/// Row 0 is the top of the square (y = +1), column 0 the left edge
/// (x = -1). Pixel (i, j) has flat index i * cols + j.
struct Grid {
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t size() const noexcept { return rows * cols; }
    double pixel_height() const noexcept { return 2.0 / static_cast<double>(rows); }
    double pixel_width() const noexcept { return 2.0 / static_cast<double>(cols); }

    std::size_t flat(std::size_t i, std::size_t j) const noexcept { return i * cols + j; }

    // Single rounded division: coincident centers of different grids compare equal.
    double center_x(std::size_t j) const noexcept {
        return (2.0 * static_cast<double>(j) + 1.0 - static_cast<double>(cols)) / static_cast<double>(cols);
    }
    double center_y(std::size_t i) const noexcept {
        return (static_cast<double>(rows) - 2.0 * static_cast<double>(i) - 1.0) / static_cast<double>(rows);
    }

    void validate() const {
        detail::require(rows >= 1 && cols >= 1, "grid must have at least one row and one column");
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Row-major image of real intensities on a Grid.
class Image {
public:
    Image() = default;

    explicit Image(Grid grid, double fill = 0.0) : grid_(grid), data_(checked(grid).size(), fill) {}

    Image(Grid grid, std::vector<double> data) : grid_(grid), data_(std::move(data)) {
        checked(grid);
        detail::require_dims(data_.size() == grid_.size(),
                             "image payload length does not match grid");
    }

    const Grid& grid() const noexcept { return grid_; }
    std::size_t rows() const noexcept { return grid_.rows; }
    std::size_t cols() const noexcept { return grid_.cols; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * grid_.cols + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * grid_.cols + j]; }
    double& operator[](std::size_t k) noexcept { return data_[k]; }
    double operator[](std::size_t k) const noexcept { return data_[k]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& vector() const noexcept { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    static const Grid& checked(const Grid& g) {
        g.validate();
        return g;
    }

    Grid grid_{};
    std::vector<double> data_;
};

inline void require_same_grid(const Image& a, const Image& b, const char* what) {
    detail::require_dims(a.grid() == b.grid(), std::string(what) + ": image grids differ");
}

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double distance2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace suprox
