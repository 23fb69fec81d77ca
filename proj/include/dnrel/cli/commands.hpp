#pragma once

// The five batch commands. Each writes its files into spec.out and returns
// the process exit status: 0 iff every check it performs passes.

#include "dnrel/cli/runspec.hpp"
#include "dnrel/verify/convergence.hpp"
#include "dnrel/verify/identities.hpp"
#include "dnrel/verify/oracles.hpp"
#include "dnrel/verify/ttprop.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace dnrel::cli {

using verify::CheckReport;
using verify::format_double;

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommandOutcome {
    int exit_code = 0;
    std::vector<std::string> files;  // written, relative to spec.out
};

namespace detail {

class Writer {
public:
    explicit Writer(const RunSpec& spec, CommandOutcome& outcome) : dir_(spec.out), outcome_(outcome)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw OutputError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void text(const std::string& name, const std::string& body)
    {
        const auto path = dir_ / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw OutputError("cannot open " + path.string() + " for writing");
        f << body;
        if (!f) throw OutputError("write failed: " + path.string());
        outcome_.files.push_back(name);
    }

    void json(const std::string& name, const Json& j) { text(name, j.dump(2) + "\n"); }

private:
    std::filesystem::path dir_;
    CommandOutcome& outcome_;
};

inline Json lambda_json(Complex z)
{
    if (z.imag() == 0.0) return z.real();
    return Json::array({z.real(), z.imag()});
}

inline Json model_json(const grid::DiscreteModel& m, const RunSpec& spec)
{
    Json j;
    j["domain"] = m.domain().descriptor();
    j["h"] = m.domain().h();
    j["nodes"] = m.n_nodes();
    j["interior"] = m.n_interior();
    j["boundary"] = m.n_boundary();
    j["essinf_potential"] = m.potential().minCoeff();
    j["corrupt"] = spec.corrupt;
    return j;
}

inline bool zero_potential(const grid::DiscreteModel& m) { return (m.potential().array() == 0.0).all(); }

/// Eigenvalues of D(λ) at real λ: the Schur matrix away from the Dirichlet
/// spectrum, the relation path at it.
struct DtnSpectrum {
    std::vector<double> eigenvalues;
    Index mul_dim = 0;
};

inline DtnSpectrum dtn_spectrum(const grid::DiscreteModel& m, double lambda, std::span<const double> dirichlet,
                                double tol)
{
    DtnSpectrum out;
    if (!maps::proximity(lambda, dirichlet).near()) {
        out.eigenvalues = verify::detail::symmetric_eigenvalues(maps::dtn_matrix(m, lambda, dirichlet));
    } else {
        const auto spec = eigen(maps::dtn<double>(m, lambda, tol));
        out.eigenvalues = spec.eigenvalues;
        out.mul_dim = spec.mul_dim;
    }
    return out;
}

}  // namespace detail

/// CSV of the A_D and A_N eigenvalues; on the unit square with V = 0 also the
/// closed-form Dirichlet values and their relative deviation.
inline CommandOutcome cmd_spectrum(const RunSpec& spec, const grid::DiscreteModel& model)
{
    CommandOutcome outcome;
    detail::Writer w(spec, outcome);
    const auto r = grid::realizations(model);
    const auto ad = grid::spectrum_of(r.dirichlet, false).eigenvalues;
    const auto an = grid::spectrum_of(r.neumann, false).eigenvalues;
    const bool oracle = spec.domain.is_square() && detail::zero_potential(model);
    std::vector<double> exact;
    if (oracle) exact = verify::analytic_grid_eigs(spec.domain.nx, spec.domain.ny, spec.domain.h);

    std::ostringstream csv;
    csv << "index,dirichlet,neumann" << (oracle ? ",analytic_dirichlet,relative_error" : "") << "\r\n";
    for (std::size_t k = 0; k < ad.size(); ++k) {
        csv << k << ',' << format_double(ad[k]) << ',' << format_double(an[k]);
        if (oracle)
            csv << ',' << format_double(exact[k]) << ','
                << format_double(std::abs(ad[k] - exact[k]) / std::max(1.0, std::abs(exact[k])));
        csv << "\r\n";
    }
    w.text("spectrum.csv", csv.str());

    std::vector<CheckReport> checks;
    const std::string ctx = model.domain().descriptor();
    const double floor_tol = 1e-8 * model.scale();
    checks.push_back(verify::make_report(
        "realization.lower_bound", ctx,
        std::max({0.0, r.essinf_potential - ad.front() - floor_tol, r.essinf_potential - an.front() - floor_tol}), 0.0));
    if (oracle)
        checks.push_back(verify::make_report("oracle.analytic_dirichlet", ctx,
                                             verify::max_relative_deviation(ad, exact), 1e-9));
    if (detail::zero_potential(model)) {
        double worst = 0.0;
        for (std::size_t k = 0; k < ad.size(); ++k) worst = std::max(worst, an[k] - ad[k]);
        checks.push_back(verify::make_report("realization.interlacing", ctx, std::max(0.0, worst), floor_tol));
    }
    if (!spec.convergence_cells.empty()) {
        std::vector<double> targets;
        for (Complex z : spec.lambdas) targets.push_back(z.real());
        const auto study = verify::convergence_study(spec.convergence_cells, targets,
                                                     static_cast<std::size_t>(spec.lowest));
        std::ostringstream cc;
        cc << "cells,h,quantity,index,value\r\n";
        for (const auto& lv : study.levels) {
            for (std::size_t k = 0; k < lv.dirichlet.size(); ++k)
                cc << lv.cells << ',' << format_double(lv.h) << ",dirichlet," << k << ',' << format_double(lv.dirichlet[k]) << "\r\n";
            for (std::size_t k = 0; k < lv.neumann.size(); ++k)
                cc << lv.cells << ',' << format_double(lv.h) << ",neumann," << k << ',' << format_double(lv.neumann[k]) << "\r\n";
            for (const auto& [lam, kap] : lv.kappa_minus_d)
                cc << lv.cells << ',' << format_double(lv.h) << ",kappa_minus_D," << format_double(lam) << ',' << kap << "\r\n";
        }
        w.text("convergence.csv", cc.str());
        checks.push_back(verify::make_report("convergence.slope", "unit square", study.slope_ok() ? 0.0 : 1.0, 0.0,
                                             {{"slope", study.slope}}));
    }
    Json j;
    j["command"] = "spectrum";
    j["model"] = detail::model_json(model, spec);
    j["dirichlet_min"] = ad.front();
    j["neumann_min"] = an.front();
    j["checks"] = verify::to_json(checks);
    j["all_passed"] = verify::all_passed(checks);
    w.json("spectrum.json", j);
    outcome.exit_code = verify::all_passed(checks) ? 0 : 1;
    return outcome;
}

/// Every boundary map at every λ, serialized.
inline CommandOutcome cmd_maps(const RunSpec& spec, const grid::DiscreteModel& model)
{
    CommandOutcome outcome;
    detail::Writer w(spec, outcome);
    const auto r = grid::realizations(model);
    const auto lambdas = spec.all_lambdas();
    std::vector<Json> points(lambdas.size());
    std::vector<char> ok(lambdas.size(), 1);
    const auto one = [&]<class T>(T lam, Json& p) {
        const auto b = maps::bundle<T>(model, r, lam, spec.tol);
        p["sol_dim"] = b.sol_dim;
        p["silent_dim"] = b.silent_dim;
        p["dtn"] = to_json(b.dtn);
        p["ntd"] = to_json(b.ntd);
        p["gamma_d"] = to_json(b.gamma_d);
        p["gamma_n"] = to_json(b.gamma_n);
        p["dirichlet_kernel"] = to_json(b.dirichlet_kernel);
        p["neumann_kernel"] = to_json(b.neumann_kernel);
        if constexpr (std::is_same_v<T, double>) {
            p["dtn_spectrum"] = to_json(eigen(b.dtn));
            p["ntd_spectrum"] = to_json(eigen(b.ntd));
        }
    };
    parallel_for(lambdas.size(), effective_threads(spec), [&](std::size_t i) {
        Json& p = points[i];
        p["lambda"] = detail::lambda_json(lambdas[i]);
        try {
            if (lambdas[i].imag() == 0.0)
                one(lambdas[i].real(), p);
            else
                one(lambdas[i], p);
        } catch (const std::exception& e) {
            p["error"] = e.what();
            ok[i] = 0;
        }
    });
    Json j;
    j["command"] = "maps";
    j["model"] = detail::model_json(model, spec);
    j["tol"] = spec.tol;
    j["points"] = points;
    w.json("maps.json", j);
    outcome.exit_code = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; }) ? 0 : 1;
    return outcome;
}

/// The identity suite (plus optional B^*A^{-1}B trials).
inline CommandOutcome cmd_verify(const RunSpec& spec, const grid::DiscreteModel& model)
{
    CommandOutcome outcome;
    detail::Writer w(spec, outcome);
    verify::IdentitySuiteOptions opt;
    opt.tol = spec.check_tol;
    opt.relation_tol = spec.relation_tol;
    opt.extend_with_eigenvalues = spec.extend;
    opt.derivative = spec.derivative;
    opt.threads = effective_threads(spec);
    auto res = verify::run_identity_suite(model, spec.all_lambdas(), spec.mus, opt);

    Json tt = nullptr;
    if (spec.ttprop_trials > 0) {
        auto t = verify::ttprop_suite(spec.ttprop_trials, 8, spec.seed);
        tt = Json::object();
        tt["trials"] = t.trials;
        tt["selfadjoint"] = t.selfadjoint;
        tt["injective_fraction"] = t.injective_fraction();
        tt["max_residual"] = t.max_residual;
        for (auto& r : t.reports) res.reports.push_back(std::move(r));
        verify::sort_by_name(res.reports);
    }

    std::ostringstream csv;
    verify::write_csv(csv, res.reports);
    w.text("reports.csv", csv.str());
    w.json("reports.json", verify::to_json(res.reports));
    w.json("findings.json", verify::to_json(res.findings));

    const auto failed = std::count_if(res.reports.begin(), res.reports.end(), [](const CheckReport& c) { return !c.passed; });
    Json j;
    j["command"] = "verify";
    j["model"] = detail::model_json(model, spec);
    Json lams = Json::array();
    for (Complex z : res.lambdas) lams.push_back(detail::lambda_json(z));
    j["lambdas"] = lams;
    Json mus = Json::array();
    for (Complex z : spec.mus) mus.push_back(detail::lambda_json(z));
    j["mus"] = mus;
    Json conf = Json::object();
    for (const char* c : {"generic", "dirichlet_only", "neumann_only", "both"})
        conf[c] = res.configurations.contains(c) ? res.configurations.at(c) : 0;
    j["configurations"] = conf;
    j["reports"] = res.reports.size();
    j["failed"] = failed;
    j["findings"] = res.findings.size();
    j["seed"] = spec.seed;
    j["ttprop"] = tt;
    j["all_passed"] = failed == 0;
    w.json("summary.json", j);
    outcome.exit_code = failed == 0 ? 0 : 1;
    return outcome;
}

/// Eigenvalue curves of D(λ) over the λ points, with the monotonicity check
/// between consecutive Dirichlet poles.
inline CommandOutcome cmd_sweep(const RunSpec& spec, const grid::DiscreteModel& model)
{
    CommandOutcome outcome;
    detail::Writer w(spec, outcome);
    const auto r = grid::realizations(model);
    const auto ad = grid::spectrum_of(r.dirichlet, false).eigenvalues;
    const auto an = grid::spectrum_of(r.neumann, false).eigenvalues;

    std::vector<double> lambdas;
    for (Complex z : spec.all_lambdas()) lambdas.push_back(z.real());
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

    std::vector<detail::DtnSpectrum> at(lambdas.size());
    std::vector<std::string> error(lambdas.size());
    parallel_for(lambdas.size(), effective_threads(spec), [&](std::size_t i) {
        try {
            at[i] = detail::dtn_spectrum(model, lambdas[i], ad, spec.tol);
        } catch (const std::exception& e) {
            error[i] = e.what();
        }
    });

    std::ostringstream curves, summary;
    curves << "lambda,index,eigenvalue\r\n";
    summary << "lambda,finite_count,mul_dim,kappa_minus,kappa_zero,kappa_plus,gap_around_zero\r\n";
    bool ok = true;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!error[i].empty()) {
            ok = false;
            continue;
        }
        const auto& e = at[i].eigenvalues;
        for (std::size_t k = 0; k < e.size(); ++k)
            curves << format_double(lambdas[i]) << ',' << k << ',' << format_double(e[k]) << "\r\n";
        const double zt = spec.zero_tol < 0.0 ? default_zero_tol(e) : spec.zero_tol;
        summary << format_double(lambdas[i]) << ',' << e.size() << ',' << at[i].mul_dim << ','
                << kappa(e, Sign::negative, zt) << ',' << kappa(e, Sign::zero, zt) << ','
                << kappa(e, Sign::positive, zt) << ',' << format_double(gap_around_zero(e)) << "\r\n";
    }
    w.text("sweep.csv", curves.str());
    w.text("sweep_summary.csv", summary.str());

    // Between Dirichlet poles D'(λ) <= 0, so every sorted eigenvalue is nonincreasing.
    double worst = 0.0;
    const double slack = 1e-9 * model.scale();
    const auto pole_between = [&](double a, double b) {
        return std::any_of(ad.begin(), ad.end(), [&](double e) { return e >= a - slack && e <= b + slack; });
    };
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
        if (!error[i].empty() || !error[i + 1].empty() || pole_between(lambdas[i], lambdas[i + 1])) continue;
        const auto& a = at[i].eigenvalues;
        const auto& b = at[i + 1].eigenvalues;
        if (a.size() != b.size()) continue;
        for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, b[k] - a[k]);
    }
    const auto mono = verify::make_report("sweep.monotone_between_poles", model.domain().descriptor(), worst, slack);
    ok = ok && mono.passed;

    Json j;
    j["command"] = "sweep";
    j["model"] = detail::model_json(model, spec);
    Json dx = Json::array(), nx = Json::array();
    if (!lambdas.empty()) {
        for (double e : ad)
            if (e >= lambdas.front() && e <= lambdas.back()) dx.push_back(e);
        for (double e : an)
            if (e >= lambdas.front() && e <= lambdas.back()) nx.push_back(e);
    }
    j["dirichlet_crossed"] = dx;
    j["neumann_crossed"] = nx;
    j["points"] = lambdas.size();
    Json errs = Json::array();
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        if (!error[i].empty()) errs.push_back({{"lambda", lambdas[i]}, {"error", error[i]}});
    j["errors"] = errs;
    j["checks"] = verify::to_json(std::vector<CheckReport>{mono});
    j["all_passed"] = ok;
    w.json("sweep_index.json", j);
    outcome.exit_code = ok ? 0 : 1;
    return outcome;
}

/// κ₋(D(λ)), κ₋(N(λ)) and the counting functions of A_N, A_D at each λ.
inline CommandOutcome cmd_friedlander(const RunSpec& spec, const grid::DiscreteModel& model)
{
    CommandOutcome outcome;
    detail::Writer w(spec, outcome);
    const auto r = grid::realizations(model);
    const auto ad = grid::spectrum_of(r.dirichlet, false).eigenvalues;
    const auto an = grid::spectrum_of(r.neumann, false).eigenvalues;
    std::vector<double> lambdas;
    for (Complex z : spec.all_lambdas()) lambdas.push_back(z.real());

    std::vector<verify::FriedlanderCount> counts(lambdas.size());
    std::vector<std::string> error(lambdas.size());
    parallel_for(lambdas.size(), effective_threads(spec), [&](std::size_t i) {
        try {
            counts[i] = verify::friedlander_count(model, lambdas[i], spec.zero_tol, ad, an);
        } catch (const std::exception& e) {
            error[i] = e.what();
        }
    });

    // The counting identity is asserted on the square family and only
    // measured elsewhere.
    const bool assert_counting = spec.domain.is_square() && detail::zero_potential(model);
    std::vector<CheckReport> checks, measured;
    std::ostringstream csv;
    csv << "lambda,kappa_minus_D,kappa_minus_N,kappa_zero_D,mul_D,count_AN_le,count_AD_le,counting_difference,"
           "kappa_minus_AN,gap_around_zero\r\n";
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!error[i].empty()) {
            checks.push_back(verify::make_report("friedlander.point", "lambda=" + format_double(lambdas[i]), INFINITY,
                                                 0.0, {}, error[i]));
            continue;
        }
        const auto& c = counts[i];
        csv << format_double(c.lambda) << ',' << c.kappa_minus_d << ',' << c.kappa_minus_n << ',' << c.kappa_zero_d
            << ',' << c.mul_d << ',' << c.count_an_below << ',' << c.count_ad_below << ',' << c.counting_difference()
            << ',' << c.kappa_bound << ',' << format_double(c.gap_d) << "\r\n";
        auto reps = verify::friedlander_reports(c, model.domain().descriptor());
        for (auto& rep : reps)
            (rep.name == "friedlander.counting_identity" && !assert_counting ? measured : checks).push_back(rep);
    }
    w.text("friedlander.csv", csv.str());
    Json j;
    j["command"] = "friedlander";
    j["model"] = detail::model_json(model, spec);
    j["checks"] = verify::to_json(checks);
    j["measurements"] = verify::to_json(measured);
    j["all_passed"] = verify::all_passed(checks);
    w.json("friedlander.json", j);
    outcome.exit_code = verify::all_passed(checks) ? 0 : 1;
    return outcome;
}

/// Builds the model and dispatches. Model construction errors propagate.
inline CommandOutcome run_command(const RunSpec& spec)
{
    const auto model = build_model(spec);
    switch (spec.command) {
    case Command::spectrum: return cmd_spectrum(spec, model);
    case Command::maps: return cmd_maps(spec, model);
    case Command::verify: return cmd_verify(spec, model);
    case Command::sweep: return cmd_sweep(spec, model);
    case Command::friedlander: return cmd_friedlander(spec, model);
    }
    throw std::logic_error("unknown command");
}

}  // namespace dnrel::cli
