#pragma once

// Independent reference values: closed-form five-point eigenvalues and small
// dense brute-force constructions that never touch the Schur fast paths.

#include "dnrel/grid/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dnrel::verify {

/// Dirichlet eigenvalues of the five-point Laplacian on an n x n cell square
/// of spacing h: (4/h^2)(sin^2(k pi / 2n) + sin^2(l pi / 2n)), k, l = 1..n-1,
/// ascending. Only square domains have this closed form here.
inline std::vector<double> analytic_grid_eigs(int nx, int ny, double h)
{
    if (nx != ny) throw std::invalid_argument("analytic_grid_eigs: domain is not a square (nx != ny)");
    if (nx < 2) throw std::invalid_argument("analytic_grid_eigs: need at least 2 cells per side");
    if (!(h > 0.0)) throw std::invalid_argument("analytic_grid_eigs: h must be positive");
    const int n = nx;
    std::vector<double> s(static_cast<std::size_t>(n - 1));
    for (int k = 1; k < n; ++k) {
        const double v = std::sin(k * std::numbers::pi / (2.0 * n));
        s[static_cast<std::size_t>(k - 1)] = v * v;
    }
    std::vector<double> out;
    out.reserve(s.size() * s.size());
    for (double a : s)
        for (double b : s) out.push_back(4.0 / (h * h) * (a + b));
    std::sort(out.begin(), out.end());
    return out;
}

/// Largest relative deviation between two equally long ascending lists.
inline double max_relative_deviation(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) return INFINITY;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    return worst;
}

}  // namespace dnrel::verify
