#pragma once

// Eigenvalues and κ₋(D(λ)) over a family of grids with decreasing h, and the
// log-log slope of the smallest Dirichlet eigenvalue error.

#include "dnrel/verify/friedlander.hpp"

#include <functional>
#include <numbers>
#include <optional>

namespace dnrel::verify {

struct ConvergenceLevel {
    int cells = 0;
    double h = 0.0;
    std::vector<double> dirichlet;  // lowest eigenvalues of A_D
    std::vector<double> neumann;    // lowest eigenvalues of A_N
    std::vector<std::pair<double, Index>> kappa_minus_d;  // (λ target, κ₋(D(λ)))
};

struct ConvergenceStudy {
    std::vector<ConvergenceLevel> levels;
    std::optional<double> reference;  // continuum value of the smallest Dirichlet eigenvalue
    double slope = 0.0;               // least-squares slope of log|error| against log h

    bool slope_ok() const { return reference && slope >= 1.8 && slope <= 2.2; }
};

/// Model with `cells` cells per unit length; the unit square by default.
using DomainFamily = std::function<DiscreteModel(int cells)>;

inline DiscreteModel unit_square(int cells)
{
    return grid::assemble(grid::build_rectangle(cells, cells, 1.0 / cells));
}

inline double loglog_slope(const std::vector<double>& h, const std::vector<double>& err)
{
    const auto n = static_cast<double>(h.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// cells must increase (h decreasing). `reference` enables the slope fit;
/// for the unit square it is 2π².
inline ConvergenceStudy convergence_study(const std::vector<int>& cells, const std::vector<double>& lambda_targets,
                                          std::size_t lowest = 6, const DomainFamily& family = unit_square,
                                          std::optional<double> reference = 2.0 * std::numbers::pi * std::numbers::pi)
{
    for (std::size_t i = 1; i < cells.size(); ++i)
        if (cells[i] <= cells[i - 1]) throw std::invalid_argument("convergence_study: h list must decrease");
    ConvergenceStudy study;
    study.reference = reference;
    std::vector<double> hs, errs;
    for (int c : cells) {
        const auto model = family(c);
        const auto r = grid::realizations(model);
        const auto ad = grid::spectrum_of(r.dirichlet, false).eigenvalues;
        const auto an = grid::spectrum_of(r.neumann, false).eigenvalues;
        ConvergenceLevel lv;
        lv.cells = c;
        lv.h = model.domain().h();
        lv.dirichlet.assign(ad.begin(), ad.begin() + static_cast<long>(std::min(lowest, ad.size())));
        lv.neumann.assign(an.begin(), an.begin() + static_cast<long>(std::min(lowest, an.size())));
        for (double lam : lambda_targets)
            lv.kappa_minus_d.emplace_back(lam, friedlander_count(model, lam, -1.0, ad, an).kappa_minus_d);
        if (reference) {
            hs.push_back(lv.h);
            errs.push_back(std::abs(ad.front() - *reference));
        }
        study.levels.push_back(std::move(lv));
    }
    if (reference && hs.size() >= 2) study.slope = loglog_slope(hs, errs);
    return study;
}

}  // namespace dnrel::verify
