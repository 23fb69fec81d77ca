#pragma once

// JSON layout used in report files:
//   Subspace       {"ambient_dim", "dim", "tol", "basis": [[v_0...], [v_1...], ...]}
//   LinearRelation {"dim_g", "dim_h", "graph": Subspace}
//   Spectrum       {"eigenvalues", "mul_dim", "carrier": Subspace, "eigenvectors": [[...]]}
// Basis vectors are listed one per row. Complex entries are [re, im] pairs.
// Each basis vector is written with the phase convention of normalize_phase.

#include "dnrel/relcore/spectrum.hpp"

#include <nlohmann/json.hpp>

namespace dnrel {

using Json = nlohmann::ordered_json;

namespace detail {

template <class T>
Json scalar_json(const T& x)
{
    if constexpr (is_complex_v<T>)
        return Json::array({x.real(), x.imag()});
    else
        return Json(x);
}

template <class T>
Json columns_json(Matrix<T> cols)
{
    normalize_phase(cols);
    Json out = Json::array();
    for (Index j = 0; j < cols.cols(); ++j) {
        Json v = Json::array();
        for (Index i = 0; i < cols.rows(); ++i) v.push_back(scalar_json(cols(i, j)));
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace detail

template <class T>
Json to_json(const Subspace<T>& s)
{
    Json j;
    j["ambient_dim"] = s.ambient_dim();
    j["dim"] = s.dim();
    j["tol"] = s.tol();
    j["basis"] = detail::columns_json(s.basis());
    return j;
}

template <class T>
Json to_json(const LinearRelation<T>& r)
{
    Json j;
    j["dim_g"] = r.source_dim();
    j["dim_h"] = r.target_dim();
    j["graph"] = to_json(r.graph());
    return j;
}

template <class T>
Json to_json(const Spectrum<T>& s)
{
    Json j;
    j["eigenvalues"] = s.eigenvalues;
    j["mul_dim"] = s.mul_dim;
    j["carrier"] = to_json(s.carrier);
    j["eigenvectors"] = detail::columns_json(s.eigenvectors);
    return j;
}

inline Subspace<double> subspace_from_json(const Json& j)
{
    const Index n = j.at("ambient_dim").get<Index>();
    const auto& rows = j.at("basis");
    Matrix<double> b(n, static_cast<Index>(rows.size()));
    for (std::size_t c = 0; c < rows.size(); ++c) {
        require_dims(static_cast<Index>(rows[c].size()) == n, "serialized basis vector length");
        for (Index i = 0; i < n; ++i) b(i, static_cast<Index>(c)) = rows[c][static_cast<std::size_t>(i)].get<double>();
    }
    return Subspace<double>::from_spanning(b, j.at("tol").get<double>());
}

inline LinearRelation<double> relation_from_json(const Json& j)
{
    return LinearRelation<double>(j.at("dim_g").get<Index>(), j.at("dim_h").get<Index>(),
                                  subspace_from_json(j.at("graph")));
}

}  // namespace dnrel
