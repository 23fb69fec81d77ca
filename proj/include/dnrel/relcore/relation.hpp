#pragma once

#include "dnrel/relcore/subspace.hpp"

#include <optional>

namespace dnrel {

/// A linear relation from T^dim_g to T^dim_h: a subspace of the product
/// space whose first block is the source component and second block the
/// target component.
template <class T>
class LinearRelation {
public:
    LinearRelation() = default;

    LinearRelation(Index dim_g, Index dim_h, Subspace<T> graph)
        : dim_g_(dim_g), dim_h_(dim_h), graph_(std::move(graph))
    {
        require_dims(dim_g_ + dim_h_ == graph_.ambient_dim(),
                     "graph ambient " + std::to_string(graph_.ambient_dim()) + " vs " +
                         std::to_string(dim_g_) + "+" + std::to_string(dim_h_));
    }

    /// span{(source.col(j), target.col(j))}.
    static LinearRelation from_pairs(const Matrix<T>& source, const Matrix<T>& target,
                                     double tol = kDefaultTol)
    {
        require_dims(source.cols() == target.cols(), "from_pairs column counts");
        Matrix<T> stacked(source.rows() + target.rows(), source.cols());
        stacked << source, target;
        return LinearRelation(source.rows(), target.rows(),
                              Subspace<T>::from_spanning(stacked, tol));
    }

    /// from_pairs with rank decided against a fixed reference scale; used where
    /// the pairs come from orthonormal coefficients and may be pure roundoff.
    static LinearRelation from_pairs_scaled(const Matrix<T>& source, const Matrix<T>& target, double tol,
                                            double reference)
    {
        require_dims(source.cols() == target.cols(), "from_pairs column counts");
        Matrix<T> stacked(source.rows() + target.rows(), source.cols());
        stacked << source, target;
        return LinearRelation(source.rows(), target.rows(),
                              Subspace<T>::from_spanning_scaled(stacked, tol, reference));
    }

    /// span{(source.col(j), target.col(j))} when the stacked columns are known
    /// to be independent (e.g. source is invertible).
    static LinearRelation from_independent_pairs(const Matrix<T>& source, const Matrix<T>& target,
                                                 double tol = kDefaultTol)
    {
        require_dims(source.cols() == target.cols(), "from_pairs column counts");
        Matrix<T> stacked(source.rows() + target.rows(), source.cols());
        stacked << source, target;
        return LinearRelation(source.rows(), target.rows(), Subspace<T>::from_independent(stacked, tol));
    }

    Index source_dim() const { return dim_g_; }
    Index target_dim() const { return dim_h_; }
    const Subspace<T>& graph() const { return graph_; }
    Index dim() const { return graph_.dim(); }
    double tol() const { return graph_.tol(); }

    auto source_block() const { return graph_.basis().topRows(dim_g_); }
    auto target_block() const { return graph_.basis().bottomRows(dim_h_); }

private:
    Index dim_g_ = 0;
    Index dim_h_ = 0;
    Subspace<T> graph_;
};

/// Graph {(g, M g)} of an everywhere defined operator.
template <class T>
LinearRelation<T> relation_from_matrix(const Matrix<T>& m, double tol = kDefaultTol)
{
    const Index g = m.cols();
    return LinearRelation<T>::from_independent_pairs(Matrix<T>::Identity(g, g), m, tol);
}

template <class T>
LinearRelation<T> identity_relation(Index n, double tol = kDefaultTol)
{
    return relation_from_matrix<T>(Matrix<T>::Identity(n, n), tol);
}

enum class Component { dom, ran, ker, mul };

namespace detail {

// {first-block components of graph vectors whose other block vanishes}.
template <class T>
Subspace<T> vanishing_section(const Matrix<T>& keep, const Matrix<T>& vanish, double tol)
{
    if (keep.cols() == 0) return Subspace<T>(keep.rows(), tol);
    Matrix<T> coeff = null_basis(Matrix<T>(vanish), tol);
    // keep * coeff has unit-size columns unless the section is empty.
    return Subspace<T>::from_spanning_scaled(Matrix<T>(keep * coeff), tol, 1.0);
}

}  // namespace detail

template <class T>
Subspace<T> component(const LinearRelation<T>& s, Component which)
{
    const double tol = s.tol();
    Matrix<T> top = s.source_block();
    Matrix<T> bot = s.target_block();
    // Blocks of an orthonormal basis have norm at most 1; truncating against 1
    // (not the block's own largest singular value) keeps a block that is pure
    // roundoff from turning into a spurious direction.
    switch (which) {
    case Component::dom: return Subspace<T>::from_spanning_scaled(top, tol, 1.0);
    case Component::ran: return Subspace<T>::from_spanning_scaled(bot, tol, 1.0);
    case Component::ker: return detail::vanishing_section(top, bot, tol);
    case Component::mul: return detail::vanishing_section(bot, top, tol);
    }
    throw std::logic_error("unknown relation component");
}

template <class T> Subspace<T> domain(const LinearRelation<T>& s) { return component(s, Component::dom); }
template <class T> Subspace<T> range(const LinearRelation<T>& s) { return component(s, Component::ran); }
template <class T> Subspace<T> kernel(const LinearRelation<T>& s) { return component(s, Component::ker); }
template <class T> Subspace<T> multivalued_part(const LinearRelation<T>& s) { return component(s, Component::mul); }

/// S^{-1} = {(h, g) : (g, h) in S}.
template <class T>
LinearRelation<T> inverse(const LinearRelation<T>& s)
{
    Matrix<T> b(s.graph().ambient_dim(), s.dim());
    b << s.target_block(), s.source_block();
    return LinearRelation<T>(s.target_dim(), s.source_dim(),
                             Subspace<T>::from_orthonormal(std::move(b), s.tol()));
}

/// S^* = {(h', g') : (h, h') = (g, g') for all (g, h) in S}, the orthogonal
/// complement of {(-h, g)} in H ⊕ G.
template <class T>
LinearRelation<T> adjoint(const LinearRelation<T>& s)
{
    Matrix<T> b(s.graph().ambient_dim(), s.dim());
    b << -s.target_block(), s.source_block();
    auto flipped = Subspace<T>::from_orthonormal(std::move(b), s.tol());
    return LinearRelation<T>(s.target_dim(), s.source_dim(), complement(flipped));
}

/// S + T = {(g, h + h') : (g, h) in S, (g, h') in T}.
template <class T>
LinearRelation<T> op_sum(const LinearRelation<T>& s, const LinearRelation<T>& t)
{
    require_dims(s.source_dim() == t.source_dim() && s.target_dim() == t.target_dim(),
                 "op_sum relation shapes");
    const double tol = std::max(s.tol(), t.tol());
    const Index ks = s.dim();
    Matrix<T> sys(s.source_dim(), ks + t.dim());
    sys << s.source_block(), -t.source_block();
    Matrix<T> coeff = detail::null_basis(sys, tol);
    Matrix<T> g = s.source_block() * coeff.topRows(ks);
    Matrix<T> h = s.target_block() * coeff.topRows(ks) + t.target_block() * coeff.bottomRows(t.dim());
    return LinearRelation<T>::from_pairs_scaled(g, h, tol, 1.0);
}

/// {(g, alpha h - shift g) : (g, h) in S}; alpha S - shift.
template <class T>
LinearRelation<T> scale_shift(const LinearRelation<T>& s, T alpha, T shift)
{
    if (shift != T(0))
        require_dims(s.source_dim() == s.target_dim(), "shift of a non-square relation");
    Matrix<T> g = s.source_block();
    Matrix<T> h = alpha * s.target_block();
    if (shift != T(0)) h -= shift * g;
    // For alpha != 0 the map (g, h) -> (g, alpha h - shift g) is invertible, so
    // the basis stays independent and only needs re-orthonormalizing.
    if (alpha != T(0)) return LinearRelation<T>::from_independent_pairs(g, h, s.tol());
    return LinearRelation<T>::from_pairs(g, h, s.tol());
}

template <class T>
LinearRelation<T> scale(const LinearRelation<T>& s, T alpha)
{
    return scale_shift(s, alpha, T(0));
}

/// S - T as the sum S + (-1) T.
template <class T>
LinearRelation<T> op_difference(const LinearRelation<T>& s, const LinearRelation<T>& t)
{
    return op_sum(s, scale(t, T(-1)));
}

/// S R = {(k, h) : exists g with (k, g) in R and (g, h) in S}. The pairs are
/// matched through the null space of [R_target, -S_source], which is the
/// intersection of the two cylinders R × H and K × S written in coefficients.
template <class T>
LinearRelation<T> compose(const LinearRelation<T>& s, const LinearRelation<T>& r)
{
    require_dims(s.source_dim() == r.target_dim(), "compose: middle dimensions");
    const double tol = std::max(s.tol(), r.tol());
    const Index kr = r.dim();
    Matrix<T> sys(r.target_dim(), kr + s.dim());
    sys << r.target_block(), -s.source_block();
    Matrix<T> coeff = detail::null_basis(sys, tol);
    Matrix<T> k = r.source_block() * coeff.topRows(kr);
    Matrix<T> h = s.target_block() * coeff.bottomRows(s.dim());
    return LinearRelation<T>::from_pairs_scaled(k, h, tol, 1.0);
}

/// S ∩ (U × W).
template <class T>
LinearRelation<T> restrict_to_product(const LinearRelation<T>& s, const Subspace<T>& u,
                                      const Subspace<T>& w)
{
    require_dims(u.ambient_dim() == s.source_dim() && w.ambient_dim() == s.target_dim(),
                 "restrict_to_product subspace dimensions");
    return LinearRelation<T>(s.source_dim(), s.target_dim(),
                             intersect(s.graph(), direct_sum(u, w)));
}

struct Comparison {
    bool passed = false;
    double residual = 0.0;
};

/// Operator-norm distance between graph projectors, compared against tol.
template <class T>
Comparison relation_equal(const LinearRelation<T>& s, const LinearRelation<T>& t,
                          double tol = kDefaultTol)
{
    require_dims(s.source_dim() == t.source_dim() && s.target_dim() == t.target_dim(),
                 "relation_equal relation shapes");
    const double r = projector_distance(s.graph(), t.graph());
    return {r <= tol, r};
}

/// max |(h_i, g_j) - (g_i, h_j)| over graph basis pairs.
template <class T>
double symmetry_defect(const LinearRelation<T>& s)
{
    require_dims(s.source_dim() == s.target_dim(), "symmetry test of a non-square relation");
    if (s.dim() == 0) return 0.0;
    Matrix<T> g = s.source_block();
    Matrix<T> h = s.target_block();
    Matrix<T> form = g.adjoint() * h - h.adjoint() * g;
    return form.cwiseAbs().maxCoeff();
}

template <class T>
bool is_symmetric(const LinearRelation<T>& s, double tol = kDefaultTol)
{
    return symmetry_defect(s) <= tol;
}

template <class T>
Comparison is_selfadjoint(const LinearRelation<T>& s, double tol = kDefaultTol)
{
    require_dims(s.source_dim() == s.target_dim(), "selfadjointness of a non-square relation");
    return relation_equal(s, adjoint(s), tol);
}

/// Column by column, the element h of S(g) orthogonal to mul S; nullopt when
/// some column g is not in dom S (relative residual above dom_tol; a
/// negative dom_tol means 100 * S.tol()).
template <class T>
std::optional<Matrix<T>> apply_columns(const LinearRelation<T>& s, const Matrix<T>& g,
                                       double dom_tol = -1.0)
{
    if (dom_tol < 0.0) dom_tol = 100.0 * s.tol();
    require_dims(g.rows() == s.source_dim(), "apply: argument length");
    if (g.cols() == 0) return Matrix<T>(s.target_dim(), 0);
    if (s.dim() == 0) {
        if (g.norm() == 0.0) return Matrix<T>::Zero(s.target_dim(), g.cols());
        return std::nullopt;
    }
    Matrix<T> top = s.source_block();
    // The threshold fixes the rank inside compute(), so it must come first.
    Eigen::CompleteOrthogonalDecomposition<Matrix<T>> cod(top.rows(), top.cols());
    cod.setThreshold(s.tol());
    cod.compute(top);
    Matrix<T> c = cod.solve(g);
    for (Index j = 0; j < g.cols(); ++j)
        if ((top * c.col(j) - g.col(j)).norm() > dom_tol * g.col(j).norm()) return std::nullopt;
    Matrix<T> h = s.target_block() * c;
    const Matrix<T> m = multivalued_part(s).basis();
    return Matrix<T>(h - m * (m.adjoint() * h));
}

template <class T>
std::optional<Vector<T>> apply(const LinearRelation<T>& s, const Vector<T>& g, double dom_tol = -1.0)
{
    auto r = apply_columns(s, Matrix<T>(g), dom_tol);
    if (!r) return std::nullopt;
    return Vector<T>(r->col(0));
}

}  // namespace dnrel
