#pragma once

// Dirichlet-to-Neumann and Neumann-to-Dirichlet maps of a DiscreteModel as
// linear relations on l2(B), together with the gamma-fields l2(B) -> l2(I).
//
// Everything at a given lambda is derived from one basis of the solution
// space {f : (S f)_I = lambda f_I}, so cross-identities compare consistent
// objects. The scalar type T is double for real lambda and Complex otherwise.

#include "dnrel/grid/model.hpp"

#include <Eigen/SparseLU>

#include <span>
#include <sstream>

namespace dnrel::maps {

using grid::DiscreteModel;
using grid::RealizationPair;

class EigenvalueProximityError : public std::domain_error {
public:
    EigenvalueProximityError(double lambda, double eigenvalue)
        : std::domain_error(message(lambda, eigenvalue)), lambda_(lambda), eigenvalue_(eigenvalue)
    {
    }
    double lambda() const { return lambda_; }
    double eigenvalue() const { return eigenvalue_; }

private:
    static std::string message(double lambda, double eigenvalue)
    {
        std::ostringstream os;
        os.precision(17);
        os << "lambda = " << lambda << " is within tolerance of the Dirichlet eigenvalue " << eigenvalue;
        return os.str();
    }
    double lambda_;
    double eigenvalue_;
};

/// Columns of a solution-space basis split into interior values, boundary
/// values (traces) and conormal derivatives.
template <class T>
struct SolutionBlocks {
    Matrix<T> interior;
    Matrix<T> trace;
    Matrix<T> conormal;
};

/// Orthonormal basis of {f : (S f)_I = lambda f_I}, in stacked (I then B)
/// coordinates: the null space of [S_II - lambda, S_IB].
template <class T>
Subspace<T> solution_space(const DiscreteModel& model, T lambda, double tol = kDefaultTol)
{
    const Index ni = model.n_interior(), nb = model.n_boundary();
    Matrix<T> sys(ni, ni + nb);
    sys.leftCols(ni) = detail::promote<T>(Matrix<double>(model.s_ii()));
    sys.leftCols(ni).diagonal().array() -= lambda;
    sys.rightCols(nb) = detail::promote<T>(Matrix<double>(model.s_ib()));
    return kernel_of(sys, tol);
}

template <class T>
SolutionBlocks<T> split_solutions(const DiscreteModel& model, const Subspace<T>& sol)
{
    const Index ni = model.n_interior(), nb = model.n_boundary();
    SolutionBlocks<T> b;
    b.interior = sol.basis().topRows(ni);
    b.trace = sol.basis().bottomRows(nb);
    b.conormal = detail::promote<T>(Matrix<double>(model.s_bi())) * b.interior +
                 detail::promote<T>(Matrix<double>(model.s_bb())) * b.trace;
    return b;
}

/// D(lambda) = {(f_B, Λf)}.
template <class T>
LinearRelation<T> dtn(const DiscreteModel& model, T lambda, double tol = kDefaultTol)
{
    const auto b = split_solutions(model, solution_space(model, lambda, tol));
    return LinearRelation<T>::from_pairs(b.trace, b.conormal, tol);
}

/// N(lambda) = D(lambda)^{-1} = {(Λf, f_B)}.
template <class T>
LinearRelation<T> ntd(const DiscreteModel& model, T lambda, double tol = kDefaultTol)
{
    return inverse(dtn(model, lambda, tol));
}

/// gamma_D(lambda) = {(f_B, f_I)}.
template <class T>
LinearRelation<T> gamma_d(const DiscreteModel& model, T lambda, double tol = kDefaultTol)
{
    const auto b = split_solutions(model, solution_space(model, lambda, tol));
    return LinearRelation<T>::from_pairs(b.trace, b.interior, tol);
}

/// gamma_N(lambda) = {(Λf, f_I)}.
template <class T>
LinearRelation<T> gamma_n(const DiscreteModel& model, T lambda, double tol = kDefaultTol)
{
    const auto b = split_solutions(model, solution_space(model, lambda, tol));
    return LinearRelation<T>::from_pairs(b.conormal, b.interior, tol);
}

/// {((A_D - conj(lambda)) g, -S_BI g) : g in l2(I)}.
template <class T>
LinearRelation<T> gamma_d_adjoint_direct(const DiscreteModel& model, T lambda, double tol = kDefaultTol)
{
    Matrix<T> src = detail::promote<T>(Matrix<double>(model.s_ii()));
    src.diagonal().array() -= detail::conj_if(lambda);
    Matrix<T> dst = -detail::promote<T>(Matrix<double>(model.s_bi()));
    return LinearRelation<T>::from_pairs(src, dst, tol);
}

/// {((A_N - conj(lambda)) g, neumann_trace(g)) : g in l2(I)}.
template <class T>
LinearRelation<T> gamma_n_adjoint_direct(const RealizationPair& r, T lambda, double tol = kDefaultTol)
{
    Matrix<T> src = detail::promote<T>(r.neumann);
    src.diagonal().array() -= detail::conj_if(lambda);
    return LinearRelation<T>::from_pairs(src, detail::promote<T>(r.neumann_extension), tol);
}

/// ker(A - lambda) for a symmetric realization A.
template <class T>
Subspace<T> eigenspace(const Matrix<double>& a, T lambda, double tol = kDefaultTol)
{
    Matrix<T> shifted = detail::promote<T>(a);
    shifted.diagonal().array() -= lambda;
    return kernel_of(shifted, tol);
}

/// ker(A - lambda) read off a full eigendecomposition of A. For symmetric A
/// the singular values of A - lambda are |e - lambda|, so the rank rule of
/// kernel_of is applied to those.
template <class T>
Subspace<T> eigenspace(const Spectrum<double>& spec, T lambda, double tol = kDefaultTol)
{
    const Index n = spec.eigenvectors.rows();
    double largest = 1.0;
    for (double e : spec.eigenvalues) largest = std::max(largest, std::abs(e - lambda));
    std::vector<Index> keep;
    for (Index k = 0; k < static_cast<Index>(spec.eigenvalues.size()); ++k)
        if (std::abs(spec.eigenvalues[k] - lambda) <= tol * largest) keep.push_back(k);
    Matrix<T> basis(n, static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        basis.col(static_cast<Index>(j)) = spec.eigenvectors.col(keep[j]).template cast<T>();
    return Subspace<T>::from_orthonormal(std::move(basis), tol);
}

/// (A - lambda)^{-1} = {((A - lambda) x, x)}; multivalued exactly on ker(A - lambda).
template <class T>
LinearRelation<T> resolvent(const Matrix<double>& a, T lambda, double tol = kDefaultTol)
{
    Matrix<T> shifted = detail::promote<T>(a);
    shifted.diagonal().array() -= lambda;
    return LinearRelation<T>::from_independent_pairs(shifted, Matrix<T>::Identity(a.rows(), a.cols()), tol);
}

/// I + (lambda - mu)(A - lambda)^{-1}. Built as {((A - lambda) x, (A - mu) x)},
/// which is the same relation (mul = ker(A - lambda), dom = ran(A - lambda))
/// but avoids forming the large-norm resolvent graph first.
template <class T>
LinearRelation<T> resolvent_transfer(const Matrix<double>& a, T lambda, T mu, double tol = kDefaultTol)
{
    Matrix<T> src = detail::promote<T>(a), dst = detail::promote<T>(a);
    src.diagonal().array() -= lambda;
    dst.diagonal().array() -= mu;
    // (A - lambda) x = (A - mu) x = 0 forces x = 0 when lambda != mu.
    if (lambda != mu) return LinearRelation<T>::from_independent_pairs(src, dst, tol);
    return LinearRelation<T>::from_pairs(src, dst, tol);
}

/// The sum form of resolvent_transfer, kept as an independent construction.
template <class T>
LinearRelation<T> resolvent_transfer_sum(const Matrix<double>& a, T lambda, T mu, double tol = kDefaultTol)
{
    return op_sum(identity_relation<T>(a.rows(), tol), scale(resolvent(a, lambda, tol), lambda - mu));
}

/// Relative distance of lambda from a sorted eigenvalue list; the threshold
/// for "at an eigenvalue" is 1e-6 * max(spectral radius, 1).
struct Proximity {
    double nearest = 0.0;
    double distance = INFINITY;
    double threshold = 0.0;
    bool near() const { return distance <= threshold; }
};

inline Proximity proximity(double lambda, std::span<const double> eigenvalues)
{
    Proximity p;
    double radius = 1.0;
    for (double e : eigenvalues) radius = std::max(radius, std::abs(e));
    p.threshold = 1e-6 * radius;
    for (double e : eigenvalues)
        if (std::abs(e - lambda) < p.distance) {
            p.distance = std::abs(e - lambda);
            p.nearest = e;
        }
    return p;
}

/// Schur complement S_BB - S_BI (S_II - lambda)^{-1} S_IB. When no Dirichlet
/// eigenvalues are supplied they are computed.
inline Matrix<double> dtn_matrix(const DiscreteModel& model, double lambda,
                                 std::span<const double> dirichlet_eigenvalues = {})
{
    std::vector<double> own;
    if (dirichlet_eigenvalues.empty()) {
        own = grid::spectrum_of(Matrix<double>(model.s_ii()), false).eigenvalues;
        dirichlet_eigenvalues = own;
    }
    const auto p = proximity(lambda, dirichlet_eigenvalues);
    if (p.near()) throw EigenvalueProximityError(lambda, p.nearest);

    grid::SparseMatrix shifted = model.s_ii();
    for (Index i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) -= lambda;
    shifted.makeCompressed();
    Eigen::SparseLU<grid::SparseMatrix> lu;
    lu.analyzePattern(shifted);
    lu.factorize(shifted);
    if (lu.info() != Eigen::Success) throw EigenvalueProximityError(lambda, p.nearest);
    Matrix<double> x = lu.solve(Matrix<double>(model.s_ib()));
    Matrix<double> d = Matrix<double>(model.s_bb()) - model.s_bi() * x;
    return (d + d.transpose()) / 2.0;
}

/// D(lambda) as a relation: the Schur path away from the Dirichlet spectrum,
/// the solution-space path otherwise.
inline LinearRelation<double> dtn_auto(const DiscreteModel& model, double lambda,
                                       std::span<const double> dirichlet_eigenvalues,
                                       double tol = kDefaultTol)
{
    if (!proximity(lambda, dirichlet_eigenvalues).near())
        return relation_from_matrix<double>(dtn_matrix(model, lambda, dirichlet_eigenvalues), tol);
    return dtn<double>(model, lambda, tol);
}

/// All boundary maps at one lambda, built from a single solution basis.
template <class T>
struct BoundaryMapBundle {
    T lambda{};
    Subspace<T> solutions;
    LinearRelation<T> dtn;
    LinearRelation<T> ntd;
    LinearRelation<T> gamma_d;
    LinearRelation<T> gamma_n;
    Subspace<T> dirichlet_kernel;  // ker(A_D - lambda)
    Subspace<T> neumann_kernel;    // ker(A_N - lambda)
    Index sol_dim = 0;
    /// dim{f solution : f_B = 0, Λf = 0}; nonzero means discrete unique continuation fails.
    Index silent_dim = 0;
};

/// Builds every map at lambda and enforces the bundle invariants:
/// N = D^{-1}, dim D = dim N = sol_dim - silent_dim, ker D = mul N, ker N = mul D.
template <class T>
BoundaryMapBundle<T> bundle(const DiscreteModel& model, const RealizationPair& r, T lambda,
                            double tol = kDefaultTol)
{
    BoundaryMapBundle<T> b;
    b.lambda = lambda;
    b.solutions = solution_space(model, lambda, tol);
    b.sol_dim = b.solutions.dim();
    const auto blocks = split_solutions(model, b.solutions);
    b.dtn = LinearRelation<T>::from_pairs(blocks.trace, blocks.conormal, tol);
    b.ntd = inverse(b.dtn);
    b.gamma_d = LinearRelation<T>::from_pairs(blocks.trace, blocks.interior, tol);
    b.gamma_n = LinearRelation<T>::from_pairs(blocks.conormal, blocks.interior, tol);
    b.dirichlet_kernel = r.dirichlet_spectrum ? eigenspace(*r.dirichlet_spectrum, lambda, tol)
                                              : eigenspace(r.dirichlet, lambda, tol);
    b.neumann_kernel = r.neumann_spectrum ? eigenspace(*r.neumann_spectrum, lambda, tol)
                                          : eigenspace(r.neumann, lambda, tol);

    Matrix<T> boundary_data(2 * model.n_boundary(), b.sol_dim);
    boundary_data << blocks.trace, blocks.conormal;
    b.silent_dim = kernel_of(boundary_data, tol).dim();

    const auto fail = [](const std::string& what, double value) {
        throw ContractError("bundle invariant violated: " + what + " (" + std::to_string(value) + ")");
    };
    const double inv = relation_equal(b.ntd, inverse(b.dtn), 1e-12).residual;
    if (inv > 1e-12) fail("N != D^{-1}", inv);
    if (b.dtn.dim() != b.sol_dim - b.silent_dim || b.ntd.dim() != b.dtn.dim())
        fail("graph dimension count", static_cast<double>(b.dtn.dim()));
    const double kd = projector_distance(kernel(b.dtn), multivalued_part(b.ntd));
    if (kd > 1e-9) fail("ker D != mul N", kd);
    const double kn = projector_distance(kernel(b.ntd), multivalued_part(b.dtn));
    if (kn > 1e-9) fail("ker N != mul D", kn);
    return b;
}

}  // namespace dnrel::maps
