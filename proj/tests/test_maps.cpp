#include "dnrel/maps/maps.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace dnrel;
using namespace dnrel::maps;
using oracle::Mat;
using oracle::Vec;

namespace {

grid::DiscreteModel chain4(double v = 0.0) { return grid::assemble(grid::build_chain(4, 1.0), v); }

Subspace<double> line(double a, double b)
{
    Mat m(2, 1);
    m << a, b;
    return Subspace<double>::from_spanning(m);
}

Subspace<double> cols(const Mat& m) { return Subspace<double>::from_spanning(m, 1e-10); }

double smallest_eig(const Mat& m) { return Eigen::SelfAdjointEigenSolver<Mat>(m).eigenvalues()(0); }

}  // namespace

TEST(SolutionSpace, Chain4AtZeroIsAffine)
{
    const auto m = chain4();
    const auto s = solution_space<double>(m, 0.0);
    ASSERT_EQ(s.dim(), 2);
    // Stacked order (I then B): affine f = (a+b, a+2b | a, a+3b).
    Mat affine(4, 2);
    affine << 1, 1, 1, 2, 1, 0, 1, 3;
    EXPECT_LE(projector_distance(s, cols(affine)), 1e-14);
}

TEST(SolutionSpace, Chain4AtOneHasAntisymmetricTraces)
{
    const auto m = chain4();
    const auto s = solution_space<double>(m, 1.0);
    ASSERT_EQ(s.dim(), 2);
    const auto b = split_solutions(m, s);
    EXPECT_LE(projector_distance(cols(b.trace), line(1, -1)), 1e-14);
}

TEST(SolutionSpace, FarBelowSpectrumHasBoundaryDimension)
{
    for (const auto& m : {chain4(), grid::assemble(grid::build_rectangle(5, 4, 0.25), 1.0)}) {
        EXPECT_EQ(solution_space<double>(m, -1e9).dim(), m.n_boundary());
    }
}

// Rank-nullity for [S_II - λ, S_IB]: the dimension exceeds |B| only by the
// Dirichlet eigenvectors that S_BI annihilates.
Index expected_solution_dim(const grid::DiscreteModel& m, double lam)
{
    Mat shifted = m.s_ii();
    shifted.diagonal().array() -= lam;
    Mat stacked(shifted.rows() + m.n_boundary(), shifted.cols());
    stacked << shifted, Mat(m.s_bi());
    return m.n_boundary() + oracle::kernel(stacked).cols();
}

TEST(SolutionSpace, DimensionByRankNullity)
{
    const auto chain = chain4();
    EXPECT_EQ(solution_space<double>(chain, 3.0).dim(), 2);  // (1,-1) has nonzero S_BI image
    EXPECT_EQ(solution_space<double>(chain, 2.0).dim(), 2);
    const auto sq = grid::assemble(grid::build_rectangle(4, 4, 1.0));
    for (double lam : grid::spectrum_of(grid::realizations(sq).dirichlet).eigenvalues)
        EXPECT_EQ(solution_space<double>(sq, lam, 1e-9).dim(), expected_solution_dim(sq, lam)) << lam;
}

TEST(SolutionSpace, SilentDirichletMode)
{
    // A T-shaped graph: interior path 0-1-2, one boundary node hanging off 1.
    // The Dirichlet eigenvector (1, 0, -1) at λ = 1 has no boundary flux, so
    // the solution space gains a direction invisible from the boundary.
    const grid::GridDomain d(1.0, {{0, 0}, {1, 0}, {2, 0}, {1, 1}}, {{0, 1}, {1, 2}, {1, 3}},
                             {false, false, false, true});
    const auto m = grid::assemble(d);
    EXPECT_EQ(solution_space<double>(m, 1.0).dim(), 2);
    EXPECT_EQ(expected_solution_dim(m, 1.0), 2);
    const auto b = bundle<double>(m, grid::realizations(m), 1.0);
    EXPECT_EQ(b.silent_dim, 1);
    EXPECT_EQ(b.dtn.dim(), 1);
}

TEST(Dtn, Chain4AtZero)
{
    const auto d0 = dtn<double>(chain4(), 0.0);
    EXPECT_LE(relation_equal(d0, relation_from_matrix<double>(oracle::chain4_dtn0())).residual, 1e-14);
    Mat third(2, 2);
    third << 1, -1, -1, 1;
    EXPECT_LE(relation_equal(d0, relation_from_matrix<double>(Mat(third / 3.0))).residual, 1e-14);
}

TEST(Dtn, Chain4AtOneIsMultivalued)
{
    const auto d1 = dtn<double>(chain4(), 1.0);
    EXPECT_LE(projector_distance(domain(d1), line(1, -1)), 1e-14);
    EXPECT_LE(projector_distance(multivalued_part(d1), line(1, 1)), 1e-14);
    const auto e = eigen(d1);
    ASSERT_EQ(e.eigenvalues.size(), 1u);
    EXPECT_NEAR(e.eigenvalues[0], 0.5, 1e-14);
}

TEST(Dtn, DomainAndMulFromDirichletKernel)
{
    const auto m = chain4();
    const auto r = grid::realizations(m);
    const auto k = eigenspace<double>(r.dirichlet, 3.0);
    const Mat sbi = m.s_bi();
    const auto mul = cols(sbi * k.basis());
    const auto d = dtn<double>(m, 3.0);
    EXPECT_LE(projector_distance(multivalued_part(d), mul), 1e-12);
    EXPECT_LE(projector_distance(domain(d), complement(mul)), 1e-12);
}

TEST(Dtn, MatchesSchurPathOffSpectrum)
{
    const auto m = grid::assemble(grid::build_masked({{1, 1, 1}, {1, 1, 1}, {1, 1, 0}}, 0.5), 0.3);
    for (double lam : {-3.0, 0.5, 7.3, 11.0}) {
        const auto fast = relation_from_matrix<double>(dtn_matrix(m, lam));
        EXPECT_LE(relation_equal(dtn<double>(m, lam), fast).residual, 1e-10) << lam;
        // The fast path itself against a dense explicit-inverse oracle.
        EXPECT_LE((dtn_matrix(m, lam) - oracle::schur_dtn(m, lam)).cwiseAbs().maxCoeff(), 1e-10 * m.scale());
    }
}

TEST(Dtn, SelfadjointForRealLambda)
{
    const auto m = grid::assemble(grid::build_rectangle(4, 3, 0.3));
    const auto r = grid::realizations(m);
    std::vector<double> lams{1.7};
    for (double e : grid::spectrum_of(r.dirichlet).eigenvalues) lams.push_back(e);
    for (double lam : lams) {
        const auto d = dtn<double>(m, lam);
        EXPECT_TRUE(is_selfadjoint(d, 1e-9).passed) << lam;
        EXPECT_TRUE(is_selfadjoint(inverse(d), 1e-9).passed) << lam;
    }
}

TEST(Ntd, Chain4AtZero)
{
    const auto n0 = ntd<double>(chain4(), 0.0);
    EXPECT_LE(projector_distance(multivalued_part(n0), line(1, 1)), 1e-14);
    const auto e = eigen(n0);
    ASSERT_EQ(e.eigenvalues.size(), 1u);
    EXPECT_NEAR(e.eigenvalues[0], 1.5, 1e-13);
    EXPECT_LE(projector_distance(e.carrier, line(1, -1)), 1e-14);
}

TEST(Ntd, Chain4AtOneKernel)
{
    EXPECT_LE(projector_distance(kernel(ntd<double>(chain4(), 1.0)), line(1, 1)), 1e-14);
}

TEST(Ntd, PositiveDefiniteBelowPotential)
{
    const auto n = ntd<double>(chain4(), -4.0);
    const auto p = operator_part(n);
    EXPECT_EQ(p.mul.dim(), 0);
    ASSERT_EQ(p.matrix.rows(), 2);
    // Brute force: N(-4) = D(-4)^{-1} from the dense Schur complement.
    const Mat brute = oracle::schur_dtn(chain4(), -4.0).inverse();
    const Mat full = p.carrier.basis() * p.matrix * p.carrier.basis().transpose();
    EXPECT_LE((full - brute).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_GT(smallest_eig(brute), 0.0);
    EXPECT_GT(eigen(n).eigenvalues.front(), 0.0);
}

TEST(Ntd, MulFromNeumannKernel)
{
    const auto m = grid::assemble(grid::build_rectangle(3, 3, 1.0));
    const auto r = grid::realizations(m);
    for (double lam : grid::spectrum_of(r.neumann).eigenvalues) {
        const auto k = eigenspace<double>(r.neumann, lam);
        const auto expected = cols(r.neumann_extension * k.basis());
        const auto n = ntd<double>(m, lam);
        EXPECT_LE(projector_distance(multivalued_part(n), expected), 1e-10) << lam;
        EXPECT_LE(projector_distance(domain(n), complement(expected)), 1e-10) << lam;
    }
}

TEST(DtnMatrix, Chain4AtZeroExact)
{
    Mat third(2, 2);
    third << 1, -1, -1, 1;
    EXPECT_LE((dtn_matrix(chain4(), 0.0) - third / 3.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DtnMatrix, Chain4AtEigenvalueThrows)
{
    try {
        dtn_matrix(chain4(), 1.0);
        FAIL() << "expected EigenvalueProximityError";
    } catch (const EigenvalueProximityError& e) {
        EXPECT_NEAR(e.eigenvalue(), 1.0, 1e-14);
        EXPECT_NE(std::string(e.what()).find("Dirichlet eigenvalue 0.99999"), std::string::npos) << e.what();
    }
    EXPECT_THROW(dtn_matrix(chain4(), 3.0 + 1e-9), EigenvalueProximityError);
}

TEST(DtnMatrix, SmallestEigenvalueDecreasesInLambda)
{
    const auto m = grid::assemble(grid::build_rectangle(5, 5, 0.2));
    double prev = INFINITY;
    for (int k = 0; k <= 40; ++k) {
        const double lam = -10.0 + 0.25 * k;
        const double e = smallest_eig(dtn_matrix(m, lam));
        EXPECT_LT(e, prev) << lam;
        prev = e;
    }
}

TEST(DtnAuto, PicksPathByProximity)
{
    const auto m = chain4();
    const std::vector<double> eigs{1.0, 3.0};
    EXPECT_LE(relation_equal(dtn_auto(m, 1.0, eigs), dtn<double>(m, 1.0)).residual, 1e-14);
    EXPECT_LE(relation_equal(dtn_auto(m, 0.0, eigs), dtn<double>(m, 0.0)).residual, 1e-14);
}

TEST(Gamma, Chain4GammaNAtZero)
{
    // Affine solution with slope b: conormal (-b, b), interior (a+b, a+2b). Harmonic
    // solutions with zero flux are the constants, so (-1, 1) maps to (1, 2) + mul.
    const auto g = gamma_n<double>(chain4(), 0.0);
    EXPECT_LE(projector_distance(multivalued_part(g), line(1, 1)), 1e-14);
    Vec pair(4);
    pair << -1, 1, 1, 2;
    EXPECT_TRUE(g.graph().contains(pair, 1e-14));
}

TEST(Gamma, GammaDTotalBelowSpectrum)
{
    const auto m = grid::assemble(grid::build_rectangle(4, 4, 0.25));
    EXPECT_EQ(domain(gamma_d<double>(m, -50.0)).dim(), m.n_boundary());
}

TEST(Gamma, Chain4GammaDMultivaluedAtOne)
{
    const auto g = gamma_d<double>(chain4(), 1.0);
    EXPECT_LE(projector_distance(multivalued_part(g), line(1, 1)), 1e-14);
    EXPECT_EQ(kernel(g).dim(), 0);
}

TEST(Gamma, MulIsRealizationKernel)
{
    const auto m = grid::assemble(grid::build_rectangle(3, 3, 1.0));
    const auto r = grid::realizations(m);
    for (double lam : grid::spectrum_of(r.neumann).eigenvalues)
        EXPECT_LE(projector_distance(multivalued_part(gamma_n<double>(m, lam)), eigenspace<double>(r.neumann, lam)), 1e-10);
    for (double lam : grid::spectrum_of(r.dirichlet).eigenvalues)
        EXPECT_LE(projector_distance(multivalued_part(gamma_d<double>(m, lam)), eigenspace<double>(r.dirichlet, lam)), 1e-10);
}

TEST(GammaAdjoint, Chain4NeumannAtOne)
{
    const auto m = chain4();
    const auto r = grid::realizations(m);
    EXPECT_LE(relation_equal(gamma_n_adjoint_direct<double>(r, 1.0), adjoint(gamma_n<double>(m, 1.0))).residual, 1e-12);
}

TEST(GammaAdjoint, MulIsNeumannTraceOfKernel)
{
    const auto m = chain4();
    const auto r = grid::realizations(m);
    for (double lam : {0.0, 2.0}) {
        const auto g = gamma_n_adjoint_direct<double>(r, lam);
        const auto k = eigenspace<double>(r.neumann, lam);
        EXPECT_LE(projector_distance(multivalued_part(g), cols(r.neumann_extension * k.basis())), 1e-12);
    }
}

TEST(GammaAdjoint, DirichletTotalInResolventSet)
{
    const auto m = grid::assemble(grid::build_rectangle(4, 3, 0.5));
    const double lam = 0.7;
    Mat ad = m.s_ii();
    ad.diagonal().array() -= lam;
    const Mat expected = -Mat(m.s_bi()) * ad.inverse();
    const auto g = gamma_d_adjoint_direct<double>(m, lam);
    EXPECT_LE(relation_equal(g, relation_from_matrix<double>(expected)).residual, 1e-12);
    EXPECT_LE(relation_equal(g, adjoint(gamma_d<double>(m, lam))).residual, 1e-10);
}

TEST(GammaAdjoint, ComplexLambda)
{
    const auto m = grid::assemble(grid::build_rectangle(3, 3, 0.5), 0.5);
    const auto r = grid::realizations(m);
    const Complex lam(4.0, 2.5);
    EXPECT_LE(relation_equal(gamma_n_adjoint_direct<Complex>(r, lam), adjoint(gamma_n<Complex>(m, lam))).residual, 1e-10);
    EXPECT_LE(relation_equal(gamma_d_adjoint_direct<Complex>(m, lam), adjoint(gamma_d<Complex>(m, lam))).residual, 1e-10);
}

TEST(Bundle, Chain4AtZero)
{
    const auto m = chain4();
    const auto b = bundle<double>(m, grid::realizations(m), 0.0);
    EXPECT_EQ(b.sol_dim, 2);
    EXPECT_EQ(b.silent_dim, 0);
    EXPECT_EQ(multivalued_part(b.ntd).dim(), 1);
}

TEST(Bundle, Chain4AtTwoHasKernel)
{
    const auto m = chain4();
    const auto b = bundle<double>(m, grid::realizations(m), 2.0);
    EXPECT_EQ(multivalued_part(b.dtn).dim(), 0);
    EXPECT_EQ(domain(b.dtn).dim(), 2);
    EXPECT_LE(projector_distance(kernel(b.dtn), line(1, -1)), 1e-12);
}

TEST(Bundle, RandomRectangleMutuallyInverse)
{
    std::mt19937_64 rng(6);
    const auto d = grid::build_rectangle(6, 6, 1.0 / 6);
    const Vec v = oracle::random_matrix(rng, d.node_count(), 1).col(0).cwiseAbs();
    const auto m = grid::assemble(d, v);
    const auto b = bundle<double>(m, grid::realizations(m), 13.37);
    const auto pd = operator_part(b.dtn), pn = operator_part(b.ntd);
    ASSERT_EQ(pd.mul.dim(), 0);
    ASSERT_EQ(pn.mul.dim(), 0);
    const Mat dm = pd.carrier.basis() * pd.matrix * pd.carrier.basis().transpose();
    const Mat nm = pn.carrier.basis() * pn.matrix * pn.carrier.basis().transpose();
    EXPECT_LE((dm * nm - Mat::Identity(dm.rows(), dm.cols())).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Bundle, SilentSolutionsAtRectangleCorners)
{
    // Corner nodes of a rectangle have no interior neighbour, so boundary data
    // need not determine the solution; the bundle records the deficit.
    const auto m = grid::assemble(grid::build_rectangle(3, 3, 1.0));
    const auto r = grid::realizations(m);
    for (double lam : grid::spectrum_of(r.dirichlet).eigenvalues) {
        const auto b = bundle<double>(m, r, lam);
        EXPECT_EQ(b.dtn.dim(), b.sol_dim - b.silent_dim);
        EXPECT_EQ(b.sol_dim, expected_solution_dim(m, lam));
    }
}
