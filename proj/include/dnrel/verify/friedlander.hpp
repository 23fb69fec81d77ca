#pragma once

// Negative-eigenvalue counts of D(λ) and N(λ) against the counting functions
// of A_N and A_D (Friedlander's count).

#include "dnrel/maps/maps.hpp"
#include "dnrel/verify/report.hpp"

#include <span>

namespace dnrel::verify {

using grid::DiscreteModel;

struct FriedlanderCount {
    double lambda = 0.0;
    Index kappa_minus_d = 0;   // κ₋(D(λ))
    Index kappa_zero_d = 0;
    Index mul_d = 0;           // dim mul D(λ)
    Index kappa_minus_n = 0;   // κ₋(N(λ)), from an independent construction of N
    Index count_an_below = 0;  // #{eigenvalues of A_N <= λ}
    Index count_ad_below = 0;  // #{eigenvalues of A_D <= λ}
    Index kappa_bound = 0;     // κ₋(A_N - λ)
    double gap_d = 0.0;        // distance from 0 of the eigenvalue of D(λ) closest to it
    std::vector<double> dtn_eigenvalues;

    Index counting_difference() const { return count_an_below - count_ad_below; }
    bool identity_holds() const { return kappa_minus_d == counting_difference(); }
    bool kappa_equal() const { return kappa_minus_d == kappa_minus_n; }
    bool bound_holds() const { return kappa_minus_n <= kappa_bound; }
};

namespace detail {

/// N(λ) = ((S - λ E_I)^{-1})_BB: the boundary values of the solution with
/// conormal data ψ, by one sparse LU of the whole stacked system.
inline Matrix<double> ntd_matrix_full_solve(const DiscreteModel& m, double lambda)
{
    const Index ni = m.n_interior(), nb = m.n_boundary();
    std::vector<Eigen::Triplet<double>> trips;
    const auto add = [&](const grid::SparseMatrix& blk, Index r0, Index c0) {
        for (Index c = 0; c < blk.outerSize(); ++c)
            for (grid::SparseMatrix::InnerIterator it(blk, c); it; ++it)
                trips.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
    };
    add(m.s_ii(), 0, 0);
    add(m.s_ib(), 0, ni);
    add(m.s_bi(), ni, 0);
    add(m.s_bb(), ni, ni);
    for (Index i = 0; i < ni; ++i) trips.emplace_back(i, i, -lambda);
    grid::SparseMatrix sys(ni + nb, ni + nb);
    sys.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<grid::SparseMatrix> lu;
    lu.analyzePattern(sys);
    lu.factorize(sys);
    if (lu.info() != Eigen::Success) throw std::runtime_error("ntd_matrix_full_solve: singular system");
    Matrix<double> rhs = Matrix<double>::Zero(ni + nb, nb);
    rhs.bottomRows(nb).setIdentity();
    Matrix<double> x = lu.solve(rhs);
    Matrix<double> n = x.bottomRows(nb);
    return (n + n.transpose()) / 2.0;
}

inline std::vector<double> symmetric_eigenvalues(const Matrix<double>& a)
{
    if (a.rows() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Matrix<double>> es(a, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().data(), es.eigenvalues().data() + a.rows()};
}

inline Index count_at_most(std::span<const double> values, double x)
{
    return static_cast<Index>(std::count_if(values.begin(), values.end(), [x](double v) { return v <= x; }));
}

}  // namespace detail

/// Counts at real λ. zero_tol < 0 selects the relative default. The
/// eigenvalues of A_D and A_N may be supplied to avoid recomputing them.
inline FriedlanderCount friedlander_count(const DiscreteModel& model, double lambda, double zero_tol = -1.0,
                                          std::span<const double> dirichlet_eigenvalues = {},
                                          std::span<const double> neumann_eigenvalues = {})
{
    std::vector<double> own_d, own_n;
    if (dirichlet_eigenvalues.empty() || neumann_eigenvalues.empty()) {
        const auto r = grid::realizations(model);
        if (dirichlet_eigenvalues.empty()) {
            own_d = grid::spectrum_of(r.dirichlet, false).eigenvalues;
            dirichlet_eigenvalues = own_d;
        }
        if (neumann_eigenvalues.empty()) {
            own_n = grid::spectrum_of(r.neumann, false).eigenvalues;
            neumann_eigenvalues = own_n;
        }
    }

    FriedlanderCount fc;
    fc.lambda = lambda;
    fc.count_ad_below = detail::count_at_most(dirichlet_eigenvalues, lambda);
    fc.count_an_below = detail::count_at_most(neumann_eigenvalues, lambda);
    const double spectral_zero = 1e-8 * std::max(1.0, std::abs(lambda));
    fc.kappa_bound = static_cast<Index>(std::count_if(neumann_eigenvalues.begin(), neumann_eigenvalues.end(),
                                                      [&](double e) { return e - lambda < -spectral_zero; }));

    // D(λ): Schur matrix off the Dirichlet spectrum, relation path on it.
    if (!maps::proximity(lambda, dirichlet_eigenvalues).near()) {
        fc.dtn_eigenvalues = detail::symmetric_eigenvalues(maps::dtn_matrix(model, lambda, dirichlet_eigenvalues));
    } else {
        const auto spec = eigen(maps::dtn<double>(model, lambda, 1e-8));
        fc.dtn_eigenvalues = spec.eigenvalues;
        fc.mul_d = spec.mul_dim;
    }
    const double zt = zero_tol < 0.0 ? default_zero_tol(fc.dtn_eigenvalues) : zero_tol;
    fc.kappa_minus_d = kappa(fc.dtn_eigenvalues, Sign::negative, zt);
    fc.kappa_zero_d = kappa(fc.dtn_eigenvalues, Sign::zero, zt);
    fc.gap_d = gap_around_zero(fc.dtn_eigenvalues);

    // N(λ) independently: full-system solve off the Neumann spectrum.
    std::vector<double> n_eigs;
    if (!maps::proximity(lambda, neumann_eigenvalues).near())
        n_eigs = detail::symmetric_eigenvalues(detail::ntd_matrix_full_solve(model, lambda));
    else
        n_eigs = eigen(maps::ntd<double>(model, lambda, 1e-8)).eigenvalues;
    fc.kappa_minus_n = kappa(n_eigs, Sign::negative, zero_tol < 0.0 ? default_zero_tol(n_eigs) : zero_tol);
    return fc;
}

/// The count as reports: κ₋(D) = κ₋(N) ≤ κ₋(A_N - λ), and (measured) the
/// counting-function identity.
inline std::vector<CheckReport> friedlander_reports(const FriedlanderCount& fc, const std::string& context)
{
    const std::string ctx = context + " lambda=" + format_double(fc.lambda);
    const auto d = [](Index a, Index b) { return static_cast<double>(a > b ? a - b : b - a); };
    std::vector<CheckReport> out;
    out.push_back(make_report("friedlander.kappa_equal", ctx, d(fc.kappa_minus_d, fc.kappa_minus_n), 0.0,
                              {{"kappa_minus_D", double(fc.kappa_minus_d)}, {"kappa_minus_N", double(fc.kappa_minus_n)}}));
    out.push_back(make_report("friedlander.kappa_bound", ctx,
                              fc.bound_holds() ? 0.0 : double(fc.kappa_minus_n - fc.kappa_bound), 0.0,
                              {{"kappa_minus_N", double(fc.kappa_minus_n)}, {"kappa_minus_AN", double(fc.kappa_bound)}}));
    out.push_back(make_report("friedlander.counting_identity", ctx, d(fc.kappa_minus_d, fc.counting_difference()), 0.0,
                              {{"kappa_minus_D", double(fc.kappa_minus_d)},
                               {"count_AN_le", double(fc.count_an_below)},
                               {"count_AD_le", double(fc.count_ad_below)},
                               {"gap_around_zero", fc.gap_d}}));
    return out;
}

}  // namespace dnrel::verify
