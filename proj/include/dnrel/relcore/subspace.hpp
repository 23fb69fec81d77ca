#pragma once

#include "dnrel/relcore/linalg.hpp"

#include <vector>

namespace dnrel {

/// A subspace of T^n stored by an orthonormal basis (one basis vector per
/// column). All set operations reduce to projector arithmetic on that basis.
template <class T>
class Subspace {
public:
    Subspace() = default;

    /// The zero subspace of T^ambient.
    explicit Subspace(Index ambient, double tol = kDefaultTol)
        : basis_(ambient, 0), tol_(tol)
    {
        require_dims(ambient >= 0, "negative ambient dimension");
    }

    /// Orthonormal basis of span(columns). Singular directions with
    /// sigma <= tol * sigma_max (tol * 1 when every vector vanishes) are dropped.
    static Subspace from_spanning(const Matrix<T>& columns, double tol = kDefaultTol)
    {
        return from_spanning_scaled(columns, tol, 0.0);
    }

    /// As from_spanning, but sigma is compared with tol * reference when
    /// reference > 0. Use when the columns are images under a known map, so
    /// that pure roundoff is not promoted to rank.
    static Subspace from_spanning_scaled(const Matrix<T>& columns, double tol, double reference)
    {
        Subspace s(columns.rows(), tol);
        if (columns.cols() == 0 || columns.rows() == 0) return s;
        Eigen::BDCSVD<Matrix<T>> svd(columns, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        const double largest = reference > 0.0 ? reference : (sv(0) > 0.0 ? sv(0) : 1.0);
        Index rank = 0;
        while (rank < sv.size() && sv(rank) > tol * largest) ++rank;
        s.basis_ = svd.matrixU().leftCols(rank);
        return s;
    }

    static Subspace from_spanning(const std::vector<Vector<T>>& vectors, Index ambient,
                                  double tol = kDefaultTol)
    {
        Matrix<T> m(ambient, static_cast<Index>(vectors.size()));
        for (std::size_t j = 0; j < vectors.size(); ++j) {
            require_dims(vectors[j].size() == ambient,
                         "spanning vector " + std::to_string(j) + " has length " +
                             std::to_string(vectors[j].size()) + ", expected " +
                             std::to_string(ambient));
            m.col(static_cast<Index>(j)) = vectors[j];
        }
        return from_spanning(m, tol);
    }

    /// Orthonormal basis of span(columns) for columns known to be linearly
    /// independent (e.g. the image of a basis under an injective map); one
    /// thin Householder QR, no rank decision.
    static Subspace from_independent(const Matrix<T>& columns, double tol = kDefaultTol)
    {
        Subspace s(columns.rows(), tol);
        if (columns.cols() == 0) return s;
        require_dims(columns.cols() <= columns.rows(), "more independent columns than ambient dimension");
        Eigen::HouseholderQR<Matrix<T>> qr(columns);
        s.basis_ = qr.householderQ() * Matrix<T>::Identity(columns.rows(), columns.cols());
        return s;
    }

    /// Wraps a basis already known to be orthonormal; no re-orthogonalization.
    static Subspace from_orthonormal(Matrix<T> basis, double tol = kDefaultTol)
    {
        Subspace s(basis.rows(), tol);
        s.basis_ = std::move(basis);
        return s;
    }

    static Subspace full(Index ambient, double tol = kDefaultTol)
    {
        return from_orthonormal(Matrix<T>::Identity(ambient, ambient), tol);
    }

    Index ambient_dim() const { return basis_.rows(); }
    Index dim() const { return basis_.cols(); }
    bool is_zero() const { return dim() == 0; }
    double tol() const { return tol_; }
    const Matrix<T>& basis() const { return basis_; }

    Matrix<T> projector() const { return basis_ * basis_.adjoint(); }

    Vector<T> project(const Vector<T>& v) const
    {
        require_dims(v.size() == ambient_dim(), "projected vector length");
        return basis_ * (basis_.adjoint() * v);
    }

    /// Distance of v from the subspace, relative to |v|.
    double relative_distance(const Vector<T>& v) const
    {
        const double nv = v.norm();
        if (nv == 0.0) return 0.0;
        return (v - project(v)).norm() / nv;
    }

    bool contains(const Vector<T>& v, double tol) const { return relative_distance(v) <= tol; }

private:
    Matrix<T> basis_;
    double tol_ = kDefaultTol;
};

/// Orthogonal complement U^perp.
template <class T>
Subspace<T> complement(const Subspace<T>& u)
{
    const Index n = u.ambient_dim();
    if (u.dim() == 0) return Subspace<T>::full(n, u.tol());
    if (u.dim() == n) return Subspace<T>(n, u.tol());
    Eigen::HouseholderQR<Matrix<T>> qr(u.basis());
    Matrix<T> q = qr.householderQ() * Matrix<T>::Identity(n, n);
    return Subspace<T>::from_orthonormal(q.rightCols(n - u.dim()), u.tol());
}

/// U + W.
template <class T>
Subspace<T> span_sum(const Subspace<T>& u, const Subspace<T>& w)
{
    require_dims(u.ambient_dim() == w.ambient_dim(), "span_sum ambient dimensions");
    Matrix<T> m(u.ambient_dim(), u.dim() + w.dim());
    m << u.basis(), w.basis();
    return Subspace<T>::from_spanning(m, std::max(u.tol(), w.tol()));
}

/// U ∩ W computed as (U^perp + W^perp)^perp.
template <class T>
Subspace<T> intersect(const Subspace<T>& u, const Subspace<T>& w)
{
    require_dims(u.ambient_dim() == w.ambient_dim(), "intersect ambient dimensions");
    return complement(span_sum(complement(u), complement(w)));
}

/// U ⊕ W inside T^(m+n), first block from U.
template <class T>
Subspace<T> direct_sum(const Subspace<T>& u, const Subspace<T>& w)
{
    const Index m = u.ambient_dim(), n = w.ambient_dim();
    Matrix<T> b = Matrix<T>::Zero(m + n, u.dim() + w.dim());
    b.topLeftCorner(m, u.dim()) = u.basis();
    b.bottomRightCorner(n, w.dim()) = w.basis();
    return Subspace<T>::from_orthonormal(std::move(b), std::max(u.tol(), w.tol()));
}

/// Operator-norm distance |P_U - P_W|. Subspaces of different dimension are
/// at distance exactly 1; otherwise the distance equals |(I - P_W) U|, which
/// keeps full precision for tiny distances.
template <class T>
double projector_distance(const Subspace<T>& u, const Subspace<T>& w)
{
    require_dims(u.ambient_dim() == w.ambient_dim(), "projector_distance ambient dimensions");
    if (u.dim() != w.dim()) return 1.0;
    const Matrix<T>& a = u.basis();
    const Matrix<T>& b = w.basis();
    if (a == b) return 0.0;  // same basis: exactly zero, not roundoff
    return std::min(1.0, detail::spectral_norm(Matrix<T>(a - b * (b.adjoint() * a))));
}

/// The image of U under a linear map, canonicalized. Rank is decided
/// relative to |map| (Frobenius), so a map that annihilates U up to
/// roundoff yields the zero subspace.
template <class T>
Subspace<T> image(const Matrix<T>& map, const Subspace<T>& u, double tol)
{
    require_dims(map.cols() == u.ambient_dim(), "image: map columns vs subspace ambient");
    return Subspace<T>::from_spanning_scaled(Matrix<T>(map * u.basis()), tol, std::max(map.norm(), 1e-300));
}

/// {x : map x = 0}.
template <class T>
Subspace<T> kernel_of(const Matrix<T>& map, double tol = kDefaultTol)
{
    return Subspace<T>::from_orthonormal(detail::null_basis(map, tol), tol);
}

/// Largest deviation of the basis from orthonormality (max |B^* B - I|).
template <class T>
double orthonormality_defect(const Subspace<T>& u)
{
    if (u.dim() == 0) return 0.0;
    Matrix<T> g = u.basis().adjoint() * u.basis();
    g -= Matrix<T>::Identity(u.dim(), u.dim());
    return g.cwiseAbs().maxCoeff();
}

}  // namespace dnrel
