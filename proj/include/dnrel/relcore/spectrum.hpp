#pragma once

#include "dnrel/relcore/relation.hpp"

#include <cmath>
#include <vector>

namespace dnrel {

/// Spectral data of a selfadjoint relation: the eigenvalues of its operator
/// part on the carrier (mul S)^perp plus the dimension of the multivalued
/// part, which plays the role of an eigenvalue at infinity.
template <class T>
struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    Matrix<T> eigenvectors;           // ambient coordinates, one per column; may be empty
    Index mul_dim = 0;
    Subspace<T> carrier;

    Index total_dim() const { return static_cast<Index>(eigenvalues.size()) + mul_dim; }
    bool has_vectors() const { return eigenvectors.cols() == static_cast<Index>(eigenvalues.size()); }
};

template <class T>
struct OperatorPart {
    Subspace<T> carrier;
    Matrix<T> matrix;  // in carrier coordinates
    Subspace<T> mul;
};

/// Fixes the sign (phase) of each column so that its first entry of
/// non-negligible modulus is real and positive.
template <class T>
void normalize_phase(Matrix<T>& vectors, double tol = 1e-12)
{
    for (Index j = 0; j < vectors.cols(); ++j) {
        auto col = vectors.col(j);
        const double scale = col.cwiseAbs().maxCoeff();
        for (Index i = 0; i < col.size(); ++i) {
            if (std::abs(col(i)) > tol * scale) {
                if constexpr (is_complex_v<T>)
                    col *= std::conj(col(i)) / std::abs(col(i));
                else if (col(i) < 0)
                    col = -col;
                break;
            }
        }
    }
}

/// Splits a selfadjoint relation as (graph of an operator on the carrier) ⊕ ({0} × mul).
template <class T>
OperatorPart<T> operator_part(const LinearRelation<T>& s, double selfadjoint_tol = 1e-8)
{
    const auto sa = is_selfadjoint(s, selfadjoint_tol);
    if (!sa.passed)
        throw ContractError("operator_part: relation is not selfadjoint (residual " +
                            std::to_string(sa.residual) + ")");
    OperatorPart<T> part;
    part.mul = multivalued_part(s);
    part.carrier = complement(part.mul);
    const Matrix<T>& c = part.carrier.basis();
    const Index r = c.cols();
    if (r == 0) {
        part.matrix = Matrix<T>(0, 0);
        return part;
    }
    // Every graph vector (g, h) with g in the carrier gives (g, P_c h) in the
    // operator graph; solve X (C^* G) = C^* H in the least-squares sense.
    Matrix<T> src = c.adjoint() * Matrix<T>(s.source_block());
    Matrix<T> dst = c.adjoint() * Matrix<T>(s.target_block());
    Eigen::CompleteOrthogonalDecomposition<Matrix<T>> cod(src.cols(), src.rows());
    cod.setThreshold(s.tol());
    cod.compute(src.adjoint());
    Matrix<T> x = cod.solve(Matrix<T>(dst.adjoint())).adjoint();
    part.matrix = (x + x.adjoint()) / 2.0;
    return part;
}

/// Eigen-decomposition of a selfadjoint relation.
template <class T>
Spectrum<T> eigen(const LinearRelation<T>& s, double selfadjoint_tol = 1e-8)
{
    auto part = operator_part(s, selfadjoint_tol);
    Spectrum<T> spec;
    spec.mul_dim = part.mul.dim();
    spec.carrier = part.carrier;
    const Index r = part.matrix.rows();
    if (r == 0) {
        spec.eigenvectors = Matrix<T>(s.source_dim(), 0);
        return spec;
    }
    Eigen::SelfAdjointEigenSolver<Matrix<T>> es(part.matrix);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigen: eigensolver failed");
    spec.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + r);
    spec.eigenvectors = part.carrier.basis() * es.eigenvectors();
    normalize_phase(spec.eigenvectors);
    return spec;
}

enum class Sign { negative, zero, positive };

/// Default zero threshold: 1e-8 * max(max |eigenvalue|, 1).
inline double default_zero_tol(const std::vector<double>& eigenvalues)
{
    double m = 1.0;
    for (double v : eigenvalues) m = std::max(m, std::abs(v));
    return 1e-8 * m;
}

/// Counts eigenvalues below -zero_tol, within ±zero_tol, or above zero_tol.
/// A negative zero_tol selects default_zero_tol.
inline Index kappa(const std::vector<double>& eigenvalues, Sign sign, double zero_tol = -1.0)
{
    if (zero_tol < 0.0) zero_tol = default_zero_tol(eigenvalues);
    Index n = 0;
    for (double v : eigenvalues) {
        switch (sign) {
        case Sign::negative: n += v < -zero_tol; break;
        case Sign::zero: n += std::abs(v) <= zero_tol; break;
        case Sign::positive: n += v > zero_tol; break;
        }
    }
    return n;
}

template <class T>
Index kappa(const Spectrum<T>& spec, Sign sign, double zero_tol = -1.0)
{
    return kappa(spec.eigenvalues, sign, zero_tol);
}

/// Distance from zero of the eigenvalue closest to it; reported next to
/// integer counts so that borderline verdicts can be audited.
inline double gap_around_zero(const std::vector<double>& eigenvalues)
{
    double g = INFINITY;
    for (double v : eigenvalues) g = std::min(g, std::abs(v));
    return g;
}

}  // namespace dnrel
