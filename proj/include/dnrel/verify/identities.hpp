#pragma once

// The identity suite: every structural statement about D(λ), N(λ), the
// gamma-fields and the realizations A_D, A_N, checked at a set of spectral
// parameters λ (and partner points μ for two-point identities).

#include "dnrel/maps/maps.hpp"
#include "dnrel/parallel.hpp"
#include "dnrel/verify/report.hpp"

#include <map>
#include <optional>

namespace dnrel::verify {

using grid::DiscreteModel;
using grid::RealizationPair;

struct IdentitySuiteOptions {
    double tol = 1e-9;                      // projector / relative residual threshold
    // Rank decisions inside the relation calculus. Computed eigenvalues carry
    // an absolute error of order eps*|S|, which shows up in solution bases at
    // about 1e-10 relative on modest grids; 1e-8 stays well clear of it.
    double relation_tol = 1e-8;
    bool extend_with_eigenvalues = true;    // add every eigenvalue of A_D and A_N to the λ set
    bool derivative = true;                 // finite-difference derivative checks at real λ
    double derivative_step = 1e-4;
    double derivative_tol = 1e-5;
    unsigned threads = 1;
};

enum class SpectralConfiguration { generic, dirichlet_only, neumann_only, both };

inline const char* to_string(SpectralConfiguration c)
{
    switch (c) {
    case SpectralConfiguration::generic: return "generic";
    case SpectralConfiguration::dirichlet_only: return "dirichlet_only";
    case SpectralConfiguration::neumann_only: return "neumann_only";
    case SpectralConfiguration::both: return "both";
    }
    return "?";
}

struct IdentitySuiteResult {
    std::vector<CheckReport> reports;
    /// Measurements that may legitimately fail on a lattice (discrete unique
    /// continuation); reported, never counted against the suite.
    std::vector<CheckReport> findings;
    std::vector<Complex> lambdas;  // the λ set actually used
    std::map<std::string, int> configurations;

    bool all_passed() const { return verify::all_passed(reports); }
};

namespace detail {

struct SuiteContext {
    const DiscreteModel* model = nullptr;
    const RealizationPair* real = nullptr;
    IdentitySuiteOptions opt;
    std::string label;
};

inline std::string point_label(const SuiteContext& c, const std::string& what) { return c.label + " " + what; }

template <class T>
std::string lambda_text(T v)
{
    return format_scalar(v);
}

template <class T>
bool same_point(T a, T b)
{
    return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a));
}

inline double count_residual(Index a, Index b) { return static_cast<double>(a > b ? a - b : b - a); }

template <class T>
SpectralConfiguration classify(const maps::BoundaryMapBundle<T>& b)
{
    const bool d = b.dirichlet_kernel.dim() > 0, n = b.neumann_kernel.dim() > 0;
    if (d && n) return SpectralConfiguration::both;
    if (d) return SpectralConfiguration::dirichlet_only;
    if (n) return SpectralConfiguration::neumann_only;
    return SpectralConfiguration::generic;
}

/// One-point checks at λ; `conj_b` is the bundle at conj(λ) (the same object for real λ).
template <class T>
void single_point_checks(const SuiteContext& c, const maps::BoundaryMapBundle<T>& b,
                         const maps::BoundaryMapBundle<T>& conj_b, std::vector<CheckReport>& out)
{
    const double tol = c.opt.tol, rt = c.opt.relation_tol;
    const auto& m = *c.model;
    const auto& r = *c.real;
    const std::string ctx = point_label(c, "lambda=" + lambda_text(b.lambda));
    const Index ni = m.n_interior(), nb = m.n_boundary();

    const auto s_bi = dnrel::detail::promote<T>(Matrix<double>(m.s_bi()));
    const auto ext = dnrel::detail::promote<T>(r.neumann_extension);
    const auto neumann_traces = image(ext, b.neumann_kernel, rt);      // f|_C, f in ker(A_N - λ)
    const auto dirichlet_conormals = image(s_bi, b.dirichlet_kernel, rt);  // Λf, f in ker(A_D - λ)

    // (a) kernels and multivalued parts.
    {
        const auto ker_d = kernel(b.dtn), mul_n = multivalued_part(b.ntd);
        const double r1 = projector_distance(ker_d, mul_n), r2 = projector_distance(mul_n, neumann_traces);
        out.push_back(make_report("mulker.ker_dtn_eq_mul_ntd", ctx, std::max(r1, r2), tol,
                                  {{"ker_D_vs_mul_N", r1}, {"mul_N_vs_neumann_traces", r2}}));
        const auto ker_n = kernel(b.ntd), mul_d = multivalued_part(b.dtn);
        const double r3 = projector_distance(ker_n, mul_d), r4 = projector_distance(mul_d, dirichlet_conormals);
        out.push_back(make_report("mulker.ker_ntd_eq_mul_dtn", ctx, std::max(r3, r4), tol,
                                  {{"ker_N_vs_mul_D", r3}, {"mul_D_vs_dirichlet_conormals", r4}}));

        // (b) operator iff off the spectrum. Silent solutions (f_B = 0, Λf = 0)
        // lower both counts by the same amount; that part is a finding.
        const Index silent = b.silent_dim;
        const Index mul_d_dim = mul_d.dim(), ker_d_dim = ker_d.dim();
        const Index kad = b.dirichlet_kernel.dim(), kan = b.neumann_kernel.dim();
        const double cr = count_residual(mul_d_dim + silent, kad) + count_residual(ker_d_dim + silent, kan);
        out.push_back(make_report("mullem.dimensions", ctx, cr, 0.0,
                                  {{"dim_mul_D", double(mul_d_dim)},
                                   {"dim_ker_AD", double(kad)},
                                   {"dim_ker_D", double(ker_d_dim)},
                                   {"dim_ker_AN", double(kan)},
                                   {"silent_solutions", double(silent)}}));
        out.push_back(make_report("unique_continuation.silent_solutions", ctx, double(silent), 0.0,
                                  {{"dim_mul_D", double(mul_d_dim)}, {"dim_ker_AD", double(kad)},
                                   {"dim_ker_D", double(ker_d_dim)}, {"dim_ker_AN", double(kan)}},
                                  silent > 0 ? "solutions with zero Cauchy data: mul D can vanish at a Dirichlet "
                                               "eigenvalue, ker D at a Neumann eigenvalue"
                                             : ""));
    }

    // Injectivity of the gamma-fields (unique continuation, tested not assumed).
    {
        const Index kd = kernel(b.gamma_d).dim(), kn = kernel(b.gamma_n).dim();
        out.push_back(make_report("unique_continuation.gamma_injective", ctx, double(kd + kn), 0.0,
                                  {{"dim_ker_gamma_D", double(kd)}, {"dim_ker_gamma_N", double(kn)}},
                                  kd + kn > 0 ? "boundary data with vanishing interior solution" : ""));
        const double rd = projector_distance(multivalued_part(b.gamma_d), b.dirichlet_kernel);
        const double rn = projector_distance(multivalued_part(b.gamma_n), b.neumann_kernel);
        out.push_back(make_report("gamma.mul_eq_realization_kernel", ctx, std::max(rd, rn), tol,
                                  {{"mul_gamma_D_vs_ker_AD", rd}, {"mul_gamma_N_vs_ker_AN", rn}}));
    }

    // Domains of D and N.
    {
        const double rd = projector_distance(domain(b.dtn), complement(dirichlet_conormals));
        const double rn = projector_distance(domain(b.ntd), complement(neumann_traces));
        out.push_back(make_report("domdom.domains", ctx, std::max(rd, rn), tol,
                                  {{"dom_D", rd}, {"dom_N", rn}}));
    }

    // Adjoints of the gamma-fields against their direct forms.
    const auto gd_adj = adjoint(b.gamma_d), gn_adj = adjoint(b.gamma_n);
    {
        const double rd = relation_equal(gd_adj, maps::gamma_d_adjoint_direct<T>(m, b.lambda, rt), tol).residual;
        const double rn = relation_equal(gn_adj, maps::gamma_n_adjoint_direct<T>(r, b.lambda, rt), tol).residual;
        out.push_back(make_report("gammaadj.gamma_d", ctx, rd, tol));
        out.push_back(make_report("gammaadj.gamma_n", ctx, rn, tol));
    }

    // (g) Krein-type resolvent difference, two right-hand sides.
    {
        const auto lhs = op_difference(maps::resolvent<T>(r.neumann, b.lambda, rt),
                                       maps::resolvent<T>(r.dirichlet, b.lambda, rt));
        // (γ M) γ* is better conditioned than γ (M γ*) at multiple eigenvalues.
        const bool self_conjugate = &conj_b == &b;
        const auto via_d = compose(compose(b.gamma_n, b.dtn), self_conjugate ? gn_adj : adjoint(conj_b.gamma_n));
        const auto via_n = compose(compose(b.gamma_d, b.ntd), self_conjugate ? gd_adj : adjoint(conj_b.gamma_d));
        const double r1 = relation_equal(lhs, via_d).residual, r2 = relation_equal(lhs, via_n).residual;
        out.push_back(make_report("resdiff.krein", ctx, std::max(r1, r2), tol,
                                  {{"gammaN_D_gammaN*", r1}, {"gammaD_N_gammaD*", r2}}));
    }

    // (h) selfadjointness and negative-eigenvalue counts, real λ only.
    if constexpr (!is_complex_v<T>) {
        const auto sd = is_selfadjoint(b.dtn, tol), sn = is_selfadjoint(b.ntd, tol);
        const double maximal = count_residual(b.dtn.dim(), nb) + count_residual(b.ntd.dim(), nb);
        out.push_back(make_report("dnmapsa.selfadjoint", ctx, std::max(sd.residual, sn.residual), tol,
                                  {{"D", sd.residual}, {"N", sn.residual}, {"graph_dim_defect", maximal}}));
        out.push_back(make_report("dnmapsa.maximal_graph", ctx, maximal, 0.0));
        if (sd.residual <= 1e-8 && sn.residual <= 1e-8) {
            const auto spec_d = eigen(b.dtn), spec_n = eigen(b.ntd);
            const auto an = grid::spectrum_of(r.neumann, false).eigenvalues;
            std::vector<double> shifted(an.size());
            for (std::size_t i = 0; i < an.size(); ++i) shifted[i] = an[i] - b.lambda;
            const Index kd = kappa(spec_d, Sign::negative), kn = kappa(spec_n, Sign::negative);
            const Index bound = kappa(shifted, Sign::negative);
            out.push_back(make_report("dnmapsa.kappa_bound", ctx, double(std::max<Index>(0, kn - bound)), 0.0,
                                      {{"kappa_minus_N", double(kn)}, {"kappa_minus_AN_shift", double(bound)},
                                       {"gap_around_zero_N", gap_around_zero(spec_n.eigenvalues)}}));
            out.push_back(make_report("dnmapsa2.kappa_equal", ctx, count_residual(kd, kn), 0.0,
                                      {{"kappa_minus_D", double(kd)}, {"kappa_minus_N", double(kn)}}));
            const double dims = count_residual(spec_n.mul_dim + b.silent_dim, b.neumann_kernel.dim()) +
                                count_residual(kernel(b.ntd).dim() + b.silent_dim, b.dirichlet_kernel.dim());
            out.push_back(make_report("dnmapsa.dimensions", ctx, dims, 0.0,
                                      {{"dim_mul_N", double(spec_n.mul_dim)},
                                       {"dim_ker_AN", double(b.neumann_kernel.dim())},
                                       {"dim_ker_N", double(kernel(b.ntd).dim())},
                                       {"dim_ker_AD", double(b.dirichlet_kernel.dim())},
                                       {"silent_solutions", double(b.silent_dim)}}));
            const Index total = kappa(spec_d, Sign::negative) + kappa(spec_d, Sign::zero) +
                                kappa(spec_d, Sign::positive) + spec_d.mul_dim;
            out.push_back(make_report("dnmapsa.completeness", ctx, count_residual(total, nb), 0.0,
                                      {{"count", double(total)}, {"boundary_dim", double(nb)}}));
        }
    }
    (void)ni;
}

/// Everything about a partner point μ that does not depend on λ.
template <class T>
struct Partner {
    maps::BoundaryMapBundle<T> at;     // bundle at μ
    maps::BoundaryMapBundle<T> conj;   // bundle at conj(μ)
    LinearRelation<T> gamma_n_adj, gamma_d_adj;
    Subspace<T> dom_gamma_n, dom_gamma_d;

    Partner(const SuiteContext& c, T mu)
    {
        at = maps::bundle<T>(*c.model, *c.real, mu, c.opt.relation_tol);
        conj = is_complex_v<T> ? maps::bundle<T>(*c.model, *c.real, dnrel::detail::conj_if(mu), c.opt.relation_tol)
                               : at;
        gamma_n_adj = adjoint(at.gamma_n);
        gamma_d_adj = adjoint(at.gamma_d);
        dom_gamma_n = domain(at.gamma_n);
        dom_gamma_d = domain(at.gamma_d);
    }
};

/// Two-point checks at (λ, μ).
template <class T>
void pair_checks(const SuiteContext& c, const maps::BoundaryMapBundle<T>& bl, const Partner<T>& p,
                 std::vector<CheckReport>& out)
{
    const double tol = c.opt.tol, rt = c.opt.relation_tol;
    const auto& m = *c.model;
    const auto& r = *c.real;
    const auto& bm = p.at;
    const auto& bm_conj = p.conj;
    const T lambda = bl.lambda, mu = bm.lambda, mu_bar = dnrel::detail::conj_if(mu);
    const std::string ctx = point_label(c, "lambda=" + lambda_text(lambda) + " mu=" + lambda_text(mu));

    // (c) Green's identity for solutions at λ and μ.
    {
        const auto f = maps::split_solutions(m, bl.solutions);
        const auto g = maps::split_solutions(m, bm.solutions);
        Matrix<T> form = g.trace.adjoint() * f.conormal - g.conormal.adjoint() * f.trace -
                         (mu_bar - lambda) * (g.interior.adjoint() * f.interior);
        const double res = form.size() ? form.cwiseAbs().maxCoeff() / m.scale() : 0.0;
        out.push_back(make_report("greenlem.solutions", ctx, res, tol));
    }

    // (d) γ(λ) restricted to dom γ(μ) equals (I + (λ-μ)(A-λ)^{-1}) γ(μ).
    const bool distinct = !same_point(lambda, mu);
    const bool off_conjugate = !same_point(lambda, mu_bar);
    if (!distinct && !off_conjugate) return;
    const auto moved_n = compose(maps::resolvent_transfer<T>(r.neumann, lambda, mu, rt), bm.gamma_n);
    const auto moved_d = compose(maps::resolvent_transfer<T>(r.dirichlet, lambda, mu, rt), bm.gamma_d);
    if (distinct) {
        const auto full_i = Subspace<T>::full(m.n_interior(), rt);
        const auto lhs_n = restrict_to_product(bl.gamma_n, p.dom_gamma_n, full_i);
        const auto lhs_d = restrict_to_product(bl.gamma_d, p.dom_gamma_d, full_i);
        out.push_back(make_report("gammalambdamu.gamma_n", ctx, relation_equal(lhs_n, moved_n).residual, tol));
        out.push_back(make_report("gammalambdamu.gamma_d", ctx, relation_equal(lhs_d, moved_d).residual, tol));
    }

    // (e), (f): differences of the boundary maps through the gamma-fields.
    if (off_conjugate) {
        const auto n_diff = op_difference(bl.ntd, bm_conj.ntd);
        const auto d_diff = op_difference(bl.dtn, bm_conj.dtn);
        const auto n_rhs = scale(compose(p.gamma_n_adj, bl.gamma_n), lambda - mu_bar);
        const auto d_rhs = scale(compose(p.gamma_d_adj, bl.gamma_d), mu_bar - lambda);
        out.push_back(make_report("dnthm.ntd", ctx, relation_equal(n_diff, n_rhs).residual, tol));
        out.push_back(make_report("dnthm.dtn", ctx, relation_equal(d_diff, d_rhs).residual, tol));

        const auto n_cor = scale(compose(p.gamma_n_adj, moved_n), lambda - mu_bar);
        const auto d_cor = scale(compose(p.gamma_d_adj, moved_d), mu_bar - lambda);
        out.push_back(make_report("dncor.ntd", ctx, relation_equal(n_diff, n_cor).residual, tol));
        out.push_back(make_report("dncor.dtn", ctx, relation_equal(d_diff, d_cor).residual, tol));
    }
}

/// (N(λ)φ, φ) for each column φ, from one dense LU of S - λ E_I (λ on the
/// interior block only): the solution with conormal φ solves that system with
/// right-hand side (0, φ). Independent of the relation calculus.
inline Eigen::VectorXd ntd_forms(const DiscreteModel& m, double lambda, const Matrix<double>& phi)
{
    const Index ni = m.n_interior(), nb = m.n_boundary();
    Matrix<double> a(ni + nb, ni + nb);
    a << Matrix<double>(m.s_ii()), Matrix<double>(m.s_ib()), Matrix<double>(m.s_bi()), Matrix<double>(m.s_bb());
    a.topLeftCorner(ni, ni).diagonal().array() -= lambda;
    Matrix<double> rhs = Matrix<double>::Zero(ni + nb, phi.cols());
    rhs.bottomRows(nb) = phi;
    const Matrix<double> f = Eigen::PartialPivLU<Matrix<double>>(a).solve(rhs);
    return (phi.transpose() * f.bottomRows(nb)).diagonal();
}

/// (D(λ)φ, φ) through the Schur complement S_BB - S_BI (S_II - λ)^{-1} S_IB.
inline Eigen::VectorXd dtn_forms(const DiscreteModel& m, double lambda, const Matrix<double>& phi)
{
    Matrix<double> a = Matrix<double>(m.s_ii());
    a.diagonal().array() -= lambda;
    const Matrix<double> x = Eigen::PartialPivLU<Matrix<double>>(a).solve(Matrix<double>(m.s_ib() * phi));
    const Matrix<double> d = m.s_bb() * phi - m.s_bi() * x;
    return (phi.transpose() * d).diagonal();
}

/// Finite-difference derivative of λ ↦ (N(λ)φ, φ) and (D(λ)φ, φ) at a real λ0 for
/// every basis vector φ of the domain, against +|f|^2 and -|f|^2, where f is
/// the interior part of the solution for φ taken orthogonal to ker(A - λ0)
/// (the element of γ(λ0)φ orthogonal to mul γ(λ0)).
inline void derivative_checks(const SuiteContext& c, const maps::BoundaryMapBundle<double>& b,
                              std::vector<CheckReport>& out)
{
    const auto& m = *c.model;
    const double l0 = b.lambda, d = c.opt.derivative_step;
    const std::string ctx = point_label(c, "lambda=" + lambda_text(l0));

    const auto one = [&](const char* name, const LinearRelation<double>& at0, const LinearRelation<double>& gamma,
                         auto forms, double sign) {
        const Matrix<double> phi = domain(at0).basis();
        const auto f = apply_columns(gamma, phi);
        if (!f) {
            out.push_back(make_report(name, ctx, INFINITY, c.opt.derivative_tol, {}, "gamma-field not defined on dom"));
            return;
        }
        // Central differences at δ and δ/2 with one Richardson step: a pole at
        // distance p from λ0 leaves a relative error δ²/p² in the plain quotient.
        const Eigen::VectorXd fd1 = (forms(m, l0 + d, phi) - forms(m, l0 - d, phi)) / (2 * d);
        const Eigen::VectorXd fd2 = (forms(m, l0 + d / 2, phi) - forms(m, l0 - d / 2, phi)) / d;
        const Eigen::VectorXd fd = (4.0 * fd2 - fd1) / 3.0;
        double worst = 0.0, worst_abs = 0.0;
        for (Index j = 0; j < phi.cols(); ++j) {
            const double expect = sign * f->col(j).squaredNorm();
            worst_abs = std::max(worst_abs, std::abs(fd(j) - expect));
            // φ is a unit vector; directions the interior cannot see (rectangle
            // corners) have |f|^2 = 0, so the error is taken relative to max(|f|^2, 1).
            worst = std::max(worst, std::abs(fd(j) - expect) / std::max(std::abs(expect), 1.0));
        }
        out.push_back(make_report(name, ctx, worst, c.opt.derivative_tol,
                                  {{"max_abs_error", worst_abs}, {"directions", double(phi.cols())}}));
    };
    one("derivative.ntd", b.ntd, b.gamma_n, ntd_forms, +1.0);
    one("derivative.dtn", b.dtn, b.gamma_d, dtn_forms, -1.0);
}

template <class T>
maps::BoundaryMapBundle<T> checked_bundle(const SuiteContext& c, T lambda)
{
    return maps::bundle<T>(*c.model, *c.real, lambda, c.opt.relation_tol);
}

}  // namespace detail

/// Model-level checks: exact Green identity, symmetry, lower bounds of A_D, A_N.
inline std::vector<CheckReport> model_checks(const DiscreteModel& model, double tol = 1e-12, int random_pairs = 1000)
{
    std::vector<CheckReport> out;
    const std::string ctx = model.domain().descriptor();
    const double canonical = model.green_defect_canonical();
    const double random = model.green_defect_random(random_pairs, 12345u);
    out.push_back(make_report("green.second_identity", ctx, std::max(canonical, random), tol,
                              {{"canonical_pairs", canonical}, {"random_pairs", random}}));
    try {
        const auto r = grid::realizations(model);
        const auto ad = grid::spectrum_of(r.dirichlet, false).eigenvalues;
        const auto an = grid::spectrum_of(r.neumann, false).eigenvalues;
        const double floor_tol = 1e-8 * model.scale();
        const double below = std::max(r.essinf_potential - ad.front(), r.essinf_potential - an.front());
        out.push_back(make_report("realization.lower_bound", ctx, std::max(0.0, below - floor_tol), 0.0,
                                  {{"min_AD", ad.front()}, {"min_AN", an.front()}, {"essinf_V", r.essinf_potential}}));
    } catch (const std::exception& e) {
        out.push_back(make_report("realization.lower_bound", ctx, INFINITY, 0.0, {}, e.what()));
    }
    return out;
}

/// Derivative checks alone at one real λ0.
inline std::vector<CheckReport> derivative_reports(const DiscreteModel& model, double lambda0,
                                                   IdentitySuiteOptions opt = {})
{
    const RealizationPair real = grid::realizations(model);
    detail::SuiteContext ctx{&model, &real, opt, model.domain().descriptor()};
    std::vector<CheckReport> out;
    detail::derivative_checks(ctx, detail::checked_bundle<double>(ctx, lambda0), out);
    return out;
}

/// Runs every identity at every λ in lambda_set (extended with the spectra of
/// A_D and A_N unless disabled) and, for two-point identities, every μ in mu_set.
/// Failures are reported, never thrown.
inline IdentitySuiteResult run_identity_suite(const DiscreteModel& model, std::vector<Complex> lambda_set,
                                              std::vector<Complex> mu_set, IdentitySuiteOptions opt = {})
{
    IdentitySuiteResult result;
    result.reports = model_checks(model);
    const std::string label = model.domain().descriptor();

    RealizationPair real;
    try {
        real = grid::realizations(model);
        grid::attach_spectra(real);
        if (opt.extend_with_eigenvalues) {
            for (const auto* s : {real.dirichlet_spectrum.get(), real.neumann_spectrum.get()})
                for (double e : s->eigenvalues) lambda_set.emplace_back(e, 0.0);
        }
    } catch (const std::exception& e) {
        result.reports.push_back(make_report("suite.setup", label, INFINITY, 0.0, {}, e.what()));
        return result;
    }
    std::sort(lambda_set.begin(), lambda_set.end(), [](Complex a, Complex b) {
        return std::pair(a.real(), a.imag()) < std::pair(b.real(), b.imag());
    });
    // Numerically repeated eigenvalues are one spectral point.
    const double merge = 1e-9 * model.scale();
    lambda_set.erase(std::unique(lambda_set.begin(), lambda_set.end(),
                                 [merge](Complex a, Complex b) { return std::abs(a - b) <= merge; }),
                     lambda_set.end());
    result.lambdas = lambda_set;

    detail::SuiteContext ctx{&model, &real, opt, label};

    // Partner points: real ones as double bundles; complex ones (and, when a
    // non-real λ is present, every μ) as complex bundles.
    std::vector<std::optional<detail::Partner<double>>> mu_real(mu_set.size());
    std::vector<std::optional<detail::Partner<Complex>>> mu_cplx(mu_set.size());
    std::vector<std::string> mu_error(mu_set.size());
    const bool any_complex_lambda =
        std::any_of(lambda_set.begin(), lambda_set.end(), [](Complex z) { return z.imag() != 0.0; });
    parallel_for(mu_set.size(), opt.threads, [&](std::size_t k) {
        try {
            const Complex mu = mu_set[k];
            if (mu.imag() == 0.0) mu_real[k].emplace(ctx, mu.real());
            if (mu.imag() != 0.0 || any_complex_lambda) mu_cplx[k].emplace(ctx, mu);
        } catch (const std::exception& e) {
            mu_error[k] = e.what();
        }
    });
    for (std::size_t k = 0; k < mu_set.size(); ++k)
        if (!mu_error[k].empty())
            result.reports.push_back(make_report("suite.partner_point", label + " mu=" + format_scalar(mu_set[k]),
                                                 INFINITY, 0.0, {}, mu_error[k]));

    std::vector<std::vector<CheckReport>> per_lambda(lambda_set.size());
    std::vector<std::optional<SpectralConfiguration>> config(lambda_set.size());
    parallel_for(lambda_set.size(), opt.threads, [&](std::size_t i) {
        auto& out = per_lambda[i];
        const Complex lam = lambda_set[i];
        try {
            if (lam.imag() == 0.0) {
                const auto b = detail::checked_bundle<double>(ctx, lam.real());
                config[i] = detail::classify(b);
                detail::single_point_checks<double>(ctx, b, b, out);
                std::optional<maps::BoundaryMapBundle<Complex>> bc;
                for (std::size_t k = 0; k < mu_set.size(); ++k) {
                    if (!mu_error[k].empty()) continue;
                    if (mu_set[k].imag() == 0.0) {
                        detail::pair_checks<double>(ctx, b, *mu_real[k], out);
                    } else {
                        if (!bc) bc = detail::checked_bundle<Complex>(ctx, lam);
                        detail::pair_checks<Complex>(ctx, *bc, *mu_cplx[k], out);
                    }
                }
                if (opt.derivative) detail::derivative_checks(ctx, b, out);
            } else {
                const auto b = detail::checked_bundle<Complex>(ctx, lam);
                const auto bconj = detail::checked_bundle<Complex>(ctx, std::conj(lam));
                config[i] = detail::classify(b);
                detail::single_point_checks<Complex>(ctx, b, bconj, out);
                for (std::size_t k = 0; k < mu_set.size(); ++k)
                    if (mu_error[k].empty()) detail::pair_checks<Complex>(ctx, b, *mu_cplx[k], out);
            }
        } catch (const std::exception& e) {
            out.push_back(make_report("suite.point", label + " lambda=" + format_scalar(lam), INFINITY, 0.0, {},
                                      e.what()));
        }
    });

    for (std::size_t i = 0; i < lambda_set.size(); ++i) {
        for (auto& r : per_lambda[i])
            (r.name.starts_with("unique_continuation.") ? result.findings : result.reports).push_back(std::move(r));
        if (config[i]) ++result.configurations[to_string(*config[i])];
    }
    sort_by_name(result.reports);
    sort_by_name(result.findings);
    return result;
}

}  // namespace dnrel::verify
