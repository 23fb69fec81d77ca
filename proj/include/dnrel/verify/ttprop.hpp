#pragma once

// Random instances of T = B^* A^{-1} B for selfadjoint relations A: T must be
// selfadjoint, with dom T = {φ : Bφ ∈ ran A} and mul T = B^*(ker A).

#include "dnrel/relcore/spectrum.hpp"
#include "dnrel/verify/report.hpp"

#include <random>

namespace dnrel::verify {

struct TtpropInstance {
    LinearRelation<double> a;  // selfadjoint on R^n
    Matrix<double> b;          // n x k
};

/// (graph of a symmetric operator on a random carrier) ⊕ ({0} × rest).
/// Some operator eigenvalues are set to zero so that ker A is exercised.
inline LinearRelation<double> random_selfadjoint_relation(std::mt19937_64& rng, Index n, Index carrier_dim,
                                                          Index zero_eigs, double tol = kDefaultTol)
{
    std::normal_distribution<double> nd;
    Matrix<double> g(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) g(i, j) = nd(rng);
    const Matrix<double> q = Eigen::HouseholderQR<Matrix<double>>(g).householderQ();
    const Matrix<double> c = q.leftCols(carrier_dim);
    Vector<double> d(carrier_dim);
    for (Index i = 0; i < carrier_dim; ++i) d(i) = i < zero_eigs ? 0.0 : nd(rng);
    Matrix<double> src = Matrix<double>::Zero(n, n), dst(n, n);
    src.leftCols(carrier_dim) = c;
    dst.leftCols(carrier_dim) = c * d.asDiagonal();
    dst.rightCols(n - carrier_dim) = q.rightCols(n - carrier_dim);
    return LinearRelation<double>::from_pairs(src, dst, tol);
}

inline LinearRelation<double> ttprop_relation(const TtpropInstance& in, double tol = kDefaultTol)
{
    const auto bg = relation_from_matrix<double>(in.b, tol);
    return compose(adjoint(bg), compose(inverse(in.a), bg));
}

struct TtpropResult {
    std::vector<CheckReport> reports;
    int trials = 0;
    int selfadjoint = 0;
    int restriction_injective = 0;  // trials where B^* restricted to ker A is injective
    double max_residual = 0.0;

    double injective_fraction() const { return trials ? double(restriction_injective) / trials : 0.0; }
};

/// Checks one instance; appends reports named ttprop.* with the trial index.
inline void ttprop_check(const TtpropInstance& in, const std::string& ctx, double tol, TtpropResult& res)
{
    const double rank_tol = kDefaultTol;
    const auto t = ttprop_relation(in, rank_tol);
    const auto sa = is_selfadjoint(t, tol);
    const Index k = in.b.cols();

    // Oracles straight from the definitions, by dense complements only.
    const Subspace<double> ran_a = range(in.a);
    const Matrix<double> off_range = Matrix<double>::Identity(in.b.rows(), in.b.rows()) - ran_a.projector();
    const auto dom_oracle = kernel_of(Matrix<double>(off_range * in.b), rank_tol);
    const auto ker_a = kernel(in.a);
    const Matrix<double> bt = in.b.transpose();
    const auto mul_oracle = image(bt, ker_a, rank_tol);

    const double dom_res = projector_distance(domain(t), dom_oracle);
    const double mul_res = projector_distance(multivalued_part(t), mul_oracle);
    const double maximal = static_cast<double>(std::abs(t.dim() - k));
    res.reports.push_back(make_report("ttprop.selfadjoint", ctx, sa.residual, tol));
    res.reports.push_back(make_report("ttprop.dom", ctx, dom_res, tol));
    res.reports.push_back(make_report("ttprop.mul", ctx, mul_res, tol));
    res.reports.push_back(make_report("ttprop.maximal_graph", ctx, maximal, 0.0, {{"graph_dim", double(t.dim())}}));
    ++res.trials;
    res.selfadjoint += sa.passed;
    res.max_residual = std::max({res.max_residual, sa.residual, dom_res, mul_res});
    if (image(bt, ker_a, rank_tol).dim() == ker_a.dim()) ++res.restriction_injective;
}

/// n_trials random instances with all dimensions in [1, max_dim].
inline TtpropResult ttprop_suite(int n_trials, int max_dim, std::uint64_t seed, double tol = 1e-10)
{
    if (max_dim < 1 || max_dim > 12) throw std::invalid_argument("ttprop_suite: max_dim must lie in [1, 12]");
    std::mt19937_64 rng(seed);
    TtpropResult res;
    for (int trial = 0; trial < n_trials; ++trial) {
        std::uniform_int_distribution<Index> dim(1, max_dim);
        const Index n = dim(rng), k = dim(rng);
        const Index carrier = std::uniform_int_distribution<Index>(0, n)(rng);
        const Index zeros = carrier == 0 ? 0 : std::uniform_int_distribution<Index>(0, std::min<Index>(carrier, 2))(rng);
        TtpropInstance in{random_selfadjoint_relation(rng, n, carrier, zeros), Matrix<double>(n, k)};
        std::normal_distribution<double> nd;
        for (Index j = 0; j < k; ++j)
            for (Index i = 0; i < n; ++i) in.b(i, j) = nd(rng);
        // Every fourth B is rank deficient.
        if (trial % 4 == 3 && k > 1) in.b.col(k - 1) = in.b.col(0) * 0.5;
        const std::string ctx = "trial " + std::to_string(trial) + " n=" + std::to_string(n) +
                                " k=" + std::to_string(k) + " mul=" + std::to_string(n - carrier);
        ttprop_check(in, ctx, tol, res);
    }
    return res;
}

}  // namespace dnrel::verify
