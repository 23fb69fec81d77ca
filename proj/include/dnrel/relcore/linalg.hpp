#pragma once

// Dense linear-algebra helpers shared by the relation calculus.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace dnrel {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Rank-decision threshold used when no tolerance is given.
inline constexpr double kDefaultTol = 1e-10;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A precondition of an operation (selfadjointness, invertibility, ...) does not hold.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void require_dims(bool ok, const std::string& what)
{
    if (!ok) throw DimensionError("dimension mismatch: " + what);
}

namespace detail {

template <class T>
Matrix<T> promote(const Matrix<double>& m)
{
    return m.template cast<T>();
}

/// Largest singular value; zero for an empty matrix. Taken from the
/// smaller Gram matrix: its top eigenvalue carries relative accuracy eps
/// even when every entry is tiny, which is all a residual norm needs.
template <class Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& m)
{
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    using Scalar = typename Derived::Scalar;
    Matrix<Scalar> a = m;
    if (a.rows() < a.cols()) a = a.adjoint().eval();
    Matrix<Scalar> g = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues()(es.eigenvalues().size() - 1)));
}

/// Column-orthonormal basis of the null space of `m`, singular values at or
/// below `tol * max(sigma_max, 1)` counted as zero.
template <class T>
Matrix<T> null_basis(const Matrix<T>& m, double tol)
{
    const Index n = m.cols();
    if (n == 0) return Matrix<T>(0, 0);
    if (m.rows() == 0) return Matrix<T>::Identity(n, n);
    Eigen::BDCSVD<Matrix<T>> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double thr = tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
    Index rank = 0;
    while (rank < s.size() && s(rank) > thr) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

template <class T>
T conj_if(const T& x)
{
    if constexpr (is_complex_v<T>)
        return std::conj(x);
    else
        return x;
}

template <class T>
double real_part(const T& x)
{
    if constexpr (is_complex_v<T>)
        return x.real();
    else
        return x;
}

}  // namespace detail
}  // namespace dnrel
