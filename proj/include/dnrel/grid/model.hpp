#pragma once

#include "dnrel/grid/domain.hpp"
#include "dnrel/relcore/spectrum.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <memory>
#include <random>

namespace dnrel::grid {

using SparseMatrix = Eigen::SparseMatrix<double>;

class NeumannEliminationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The symmetric matrix S = (1/h^2) L + diag(V) of the discrete form on all
/// nodes, split into interior (I) and boundary (B) blocks.
///
/// Vectors over all nodes use node order. "Stacked" vectors list the interior
/// entries first, then the boundary entries, each in node order.
class DiscreteModel {
public:
    /// Builds S from the edge Laplacian and the potential and checks symmetry
    /// and the exact second Green identity on random vectors.
    static DiscreteModel assemble(GridDomain domain, Eigen::VectorXd potential)
    {
        const Index n = domain.node_count();
        if (potential.size() != n)
            throw DimensionError("potential has " + std::to_string(potential.size()) +
                                 " values for " + std::to_string(n) + " nodes");
        if (!potential.allFinite()) throw std::invalid_argument("potential must be finite and real");
        const double w = 1.0 / (domain.h() * domain.h());
        std::vector<Eigen::Triplet<double>> trips;
        for (const auto& [a, b] : domain.edges()) {
            trips.emplace_back(a, a, w);
            trips.emplace_back(b, b, w);
            trips.emplace_back(a, b, -w);
            trips.emplace_back(b, a, -w);
        }
        for (Index i = 0; i < n; ++i) trips.emplace_back(i, i, potential(i));
        SparseMatrix s(n, n);
        s.setFromTriplets(trips.begin(), trips.end());
        DiscreteModel m(std::move(domain), std::move(potential), std::move(s));
        const double defect = m.green_defect_random(16, 0x5eed);
        if (defect > 1e-12)
            throw std::logic_error("assembled matrix violates the Green identity: " + std::to_string(defect));
        return m;
    }

    /// Wraps an arbitrary matrix without any check. Used for fault injection.
    static DiscreteModel unchecked(GridDomain domain, Eigen::VectorXd potential, SparseMatrix s)
    {
        return DiscreteModel(std::move(domain), std::move(potential), std::move(s));
    }

    const GridDomain& domain() const { return domain_; }
    const Eigen::VectorXd& potential() const { return potential_; }
    const SparseMatrix& matrix() const { return s_; }
    Index n_interior() const { return static_cast<Index>(domain_.interior().size()); }
    Index n_boundary() const { return static_cast<Index>(domain_.boundary().size()); }
    Index n_nodes() const { return domain_.node_count(); }

    const SparseMatrix& s_ii() const { return ii_; }
    const SparseMatrix& s_ib() const { return ib_; }
    const SparseMatrix& s_bi() const { return bi_; }
    const SparseMatrix& s_bb() const { return bb_; }

    /// max |S_ij|, the scale for relative tolerances.
    double scale() const { return scale_; }

    Eigen::VectorXd stack(const Eigen::VectorXd& f) const
    {
        require_dims(f.size() == n_nodes(), "stack: vector length");
        Eigen::VectorXd out(n_nodes());
        Index k = 0;
        for (Index i : domain_.interior()) out(k++) = f(i);
        for (Index i : domain_.boundary()) out(k++) = f(i);
        return out;
    }

    Eigen::VectorXd unstack(const Eigen::VectorXd& stacked) const
    {
        require_dims(stacked.size() == n_nodes(), "unstack: vector length");
        Eigen::VectorXd out(n_nodes());
        Index k = 0;
        for (Index i : domain_.interior()) out(i) = stacked(k++);
        for (Index i : domain_.boundary()) out(i) = stacked(k++);
        return out;
    }

    /// Sum of |((Su)_I, v_I) - (u_I, (Sv)_I) - (u_B, Λv) + (Λu, v_B)| over
    /// random unit pairs, relative to scale().
    double green_defect_random(int pairs, unsigned seed) const
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        double worst = 0.0;
        for (int p = 0; p < pairs; ++p) {
            Eigen::VectorXd u(n_nodes()), v(n_nodes());
            for (Index i = 0; i < n_nodes(); ++i) u(i) = nd(rng);
            for (Index i = 0; i < n_nodes(); ++i) v(i) = nd(rng);
            u.normalize();
            v.normalize();
            worst = std::max(worst, std::abs(green_expression(u, v)) / scale_);
        }
        return worst;
    }

    /// ((Su)_I, v_I) - (u_I, (Sv)_I) - (u_B, Λv) + (Λu, v_B) for node-order
    /// vectors u, v, evaluated block by block.
    double green_expression(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const
    {
        const Eigen::VectorXd su = stack(u), sv = stack(v);
        const Index ni = n_interior(), nb = n_boundary();
        const Eigen::VectorXd ui = su.head(ni), ub = su.tail(nb), vi = sv.head(ni), vb = sv.tail(nb);
        const Eigen::VectorXd lu_i = ii_ * ui + ib_ * ub;
        const Eigen::VectorXd lv_i = ii_ * vi + ib_ * vb;
        const Eigen::VectorXd lam_u = bi_ * ui + bb_ * ub;
        const Eigen::VectorXd lam_v = bi_ * vi + bb_ * vb;
        return lu_i.dot(vi) - ui.dot(lv_i) - ub.dot(lam_v) + lam_u.dot(vb);
    }

    /// Green identity defect over all pairs of unit node vectors, relative to scale().
    double green_defect_canonical() const
    {
        // The expression is bilinear: v^T K u with K assembled from the blocks.
        const Index ni = n_interior(), nb = n_boundary();
        Matrix<double> k(n_nodes(), n_nodes());
        Matrix<double> ii = ii_, ib = ib_, bi = bi_, bb = bb_;
        k.topLeftCorner(ni, ni) = ii - ii.transpose();
        k.topRightCorner(ni, nb) = ib - bi.transpose();
        k.bottomLeftCorner(nb, ni) = bi - ib.transpose();
        k.bottomRightCorner(nb, nb) = bb - bb.transpose();
        return k.cwiseAbs().maxCoeff() / scale_;
    }

private:
    DiscreteModel(GridDomain domain, Eigen::VectorXd potential, SparseMatrix s)
        : domain_(std::move(domain)), potential_(std::move(potential)), s_(std::move(s))
    {
        require_dims(s_.rows() == domain_.node_count() && s_.cols() == domain_.node_count(),
                     "model matrix size");
        s_.makeCompressed();
        scale_ = 1.0;
        for (Index c = 0; c < s_.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(s_, c); it; ++it) scale_ = std::max(scale_, std::abs(it.value()));

        std::vector<Index> local(static_cast<std::size_t>(n_nodes()));
        for (std::size_t k = 0; k < domain_.interior().size(); ++k) local[static_cast<std::size_t>(domain_.interior()[k])] = static_cast<Index>(k);
        for (std::size_t k = 0; k < domain_.boundary().size(); ++k) local[static_cast<std::size_t>(domain_.boundary()[k])] = static_cast<Index>(k);
        std::vector<Eigen::Triplet<double>> tii, tib, tbi, tbb;
        for (Index c = 0; c < s_.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(s_, c); it; ++it) {
                const bool rb = domain_.is_boundary(it.row()), cb = domain_.is_boundary(it.col());
                const Index r = local[static_cast<std::size_t>(it.row())], cc = local[static_cast<std::size_t>(it.col())];
                (rb ? (cb ? tbb : tbi) : (cb ? tib : tii)).emplace_back(r, cc, it.value());
            }
        const Index ni = n_interior(), nb = n_boundary();
        ii_.resize(ni, ni);
        ib_.resize(ni, nb);
        bi_.resize(nb, ni);
        bb_.resize(nb, nb);
        ii_.setFromTriplets(tii.begin(), tii.end());
        ib_.setFromTriplets(tib.begin(), tib.end());
        bi_.setFromTriplets(tbi.begin(), tbi.end());
        bb_.setFromTriplets(tbb.begin(), tbb.end());
    }

    GridDomain domain_;
    Eigen::VectorXd potential_;
    SparseMatrix s_;
    SparseMatrix ii_, ib_, bi_, bb_;
    double scale_ = 1.0;
};

inline DiscreteModel assemble(GridDomain domain, Eigen::VectorXd potential)
{
    return DiscreteModel::assemble(std::move(domain), std::move(potential));
}

inline DiscreteModel assemble(GridDomain domain, double constant_potential = 0.0)
{
    const Index n = domain.node_count();
    return DiscreteModel::assemble(std::move(domain), Eigen::VectorXd::Constant(n, constant_potential));
}

/// Copy of `model` whose entry S(i, b) (first interior node, first boundary
/// neighbour) is perturbed by relative_size * scale, breaking symmetry.
inline DiscreteModel corrupt_symmetry(const DiscreteModel& model, double relative_size)
{
    SparseMatrix s = model.matrix();
    const auto& dom = model.domain();
    for (const auto& [a, b] : dom.edges()) {
        if (dom.is_boundary(a) != dom.is_boundary(b)) {
            const Index i = dom.is_boundary(a) ? b : a;
            const Index j = dom.is_boundary(a) ? a : b;
            s.coeffRef(i, j) += relative_size * model.scale();
            return DiscreteModel::unchecked(dom, model.potential(), std::move(s));
        }
    }
    throw std::logic_error("corrupt_symmetry: no interior-boundary edge");
}

/// A_D = S_II and A_N = S_II - S_IB S_BB^{-1} S_BI, both acting on l2(I).
struct RealizationPair {
    Matrix<double> dirichlet;
    Matrix<double> neumann;
    double essinf_potential = 0.0;
    /// -S_BB^{-1} S_BI: boundary values of the Neumann extension of u_I.
    Matrix<double> neumann_extension;
    /// Full eigendecompositions, filled only by attach_spectra (dense
    /// eigenvectors are too costly to compute by default on fine grids).
    std::shared_ptr<const Spectrum<double>> dirichlet_spectrum;
    std::shared_ptr<const Spectrum<double>> neumann_spectrum;
};

inline RealizationPair realizations(const DiscreteModel& model)
{
    Matrix<double> sbb = model.s_bb();
    Eigen::JacobiSVD<Matrix<double>> svd(sbb);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0))
        throw NeumannEliminationError(
            "Neumann elimination impossible for this potential: S_BB is singular (sigma_min = " +
            std::to_string(sv(sv.size() - 1)) + ")");
    RealizationPair r;
    r.dirichlet = Matrix<double>(model.s_ii());
    Matrix<double> sbi = model.s_bi();
    r.neumann_extension = -Eigen::PartialPivLU<Matrix<double>>(sbb).solve(sbi);
    r.neumann = r.dirichlet + Matrix<double>(model.s_ib() * r.neumann_extension);
    r.essinf_potential = model.potential().minCoeff();
    return r;
}

/// Boundary values of the Neumann extension: -S_BB^{-1} S_BI u_I.
inline Eigen::VectorXd neumann_trace(const RealizationPair& r, const Eigen::VectorXd& u_interior)
{
    require_dims(u_interior.size() == r.neumann_extension.cols(), "neumann_trace: interior vector length");
    return r.neumann_extension * u_interior;
}

/// Node-order vector (u_I, -S_BB^{-1} S_BI u_I) whose conormal derivative vanishes.
inline Eigen::VectorXd neumann_extension(const DiscreteModel& model, const RealizationPair& r,
                                         const Eigen::VectorXd& u_interior)
{
    Eigen::VectorXd stacked(model.n_nodes());
    stacked << u_interior, neumann_trace(r, u_interior);
    return model.unstack(stacked);
}

/// Restriction f_B of a node-order vector.
inline Eigen::VectorXd trace(const DiscreteModel& model, const Eigen::VectorXd& f)
{
    return model.stack(f).tail(model.n_boundary());
}

/// Conormal derivative Λf = (S f)_B.
inline Eigen::VectorXd conormal(const DiscreteModel& model, const Eigen::VectorXd& f)
{
    require_dims(f.size() == model.n_nodes(), "conormal: vector length");
    const Eigen::VectorXd sf = model.matrix() * f;
    return model.stack(sf).tail(model.n_boundary());
}

class AsymmetryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense symmetric eigendecomposition, ascending. With vectors = false only
/// the eigenvalues are computed, which is much cheaper on large grids.
inline Spectrum<double> spectrum_of(const Matrix<double>& a, bool vectors = true)
{
    require_dims(a.rows() == a.cols(), "spectrum_of: square matrix");
    const double sc = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * sc)
        throw AsymmetryError("spectrum_of: matrix asymmetric by " + std::to_string(asym));
    Spectrum<double> spec;
    spec.carrier = Subspace<double>::full(a.rows());
    if (a.rows() == 0) return spec;
    Eigen::SelfAdjointEigenSolver<Matrix<double>> es(
        a, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectrum_of: eigensolver failed");
    spec.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
    if (vectors) {
        spec.eigenvectors = es.eigenvectors();
        normalize_phase(spec.eigenvectors);
    }
    return spec;
}

/// Caches eigenvalues and eigenvectors of both realizations; repeated
/// eigenspace lookups then avoid an SVD per lambda.
inline void attach_spectra(RealizationPair& r)
{
    r.dirichlet_spectrum = std::make_shared<const Spectrum<double>>(spectrum_of(r.dirichlet));
    r.neumann_spectrum = std::make_shared<const Spectrum<double>>(spectrum_of(r.neumann));
}

}  // namespace dnrel::grid
