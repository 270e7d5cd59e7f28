#pragma once

// Random problem generators shared by the unit and acceptance tests.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <suprox/image.hpp>
#include <suprox/projector.hpp>

namespace suprox::testing {

inline Image random_image(Grid g, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Image x(g);
    for (double& v : x.values()) v = u(rng);
    return x;
}

/// Random sparse system with 3..6 positive entries per row.
inline std::vector<SparseRow> random_rows(std::size_t m, std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> w(0.1, 1.0);
    std::uniform_int_distribution<std::size_t> nnz(std::min<std::size_t>(3, n), std::min<std::size_t>(6, n));
    std::vector<std::uint32_t> all(n);
    std::iota(all.begin(), all.end(), 0u);
    std::vector<SparseRow> rows;
    for (std::size_t i = 0; i < m; ++i) {
        std::shuffle(all.begin(), all.end(), rng);
        std::vector<std::uint32_t> idx(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(nnz(rng)));
        std::sort(idx.begin(), idx.end());
        std::vector<double> wts(idx.size());
        for (double& v : wts) v = w(rng);
        rows.emplace_back(std::move(idx), std::move(wts));
    }
    return rows;
}

struct ConsistentProblem {
    ProjectionSystem system;
    Image solution;
};

/// m x n system whose measurements come from a solution strictly inside the box.
inline ConsistentProblem consistent_problem(Grid g, std::size_t m, std::mt19937_64& rng, Box box = {0.0, 1.0}) {
    const double pad = 0.1 * (box.hi - box.lo);
    Image sol = random_image(g, rng, box.lo + pad, box.hi - pad);
    ProjectionSystem sys(g, random_rows(m, g.size(), rng), box);
    std::vector<double> b(m);
    for (std::size_t i = 0; i < m; ++i) b[i] = sys.row(i).dot(sol.values());
    sys.set_measurements(std::move(b));
    return {std::move(sys), std::move(sol)};
}

}  // namespace suprox::testing
