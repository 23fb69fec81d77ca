#include "dnrel/grid/model.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace dnrel;
using namespace dnrel::grid;
using oracle::Mat;
using oracle::Vec;

namespace {

DiscreteModel chain4(double v = 0.0) { return assemble(build_chain(4, 1.0), v); }

Index count_boundary(const GridDomain& d) { return static_cast<Index>(d.boundary().size()); }

CellMask lshape_mask()
{
    // 4x4 cells without the top-right 2x2 block.
    CellMask m(4, std::vector<bool>(4, true));
    for (int r = 2; r < 4; ++r)
        for (int c = 2; c < 4; ++c) m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = false;
    return m;
}

Vec random_vec(std::mt19937_64& rng, Index n) { return oracle::random_matrix(rng, n, 1).col(0); }

}  // namespace

TEST(BuildRectangle, TwoByTwo)
{
    const auto d = build_rectangle(2, 2, 0.5);
    EXPECT_EQ(d.node_count(), 9);
    EXPECT_EQ(d.interior().size(), 1u);
    EXPECT_EQ(count_boundary(d), 8);
    EXPECT_EQ(d.edges().size(), 12u);
}

TEST(BuildRectangle, ThreeByTwo)
{
    const auto d = build_rectangle(3, 2, 1.0);
    EXPECT_EQ(d.node_count(), 12);
    EXPECT_EQ(d.interior().size(), 2u);
}

TEST(BuildRectangle, ThirtyTwo)
{
    const auto d = build_rectangle(32, 32, 1.0 / 32);
    EXPECT_EQ(d.interior().size(), 31u * 31u);
    EXPECT_EQ(count_boundary(d), 4 * 32);
}

TEST(BuildRectangle, TooFewCells)
{
    EXPECT_THROW(build_rectangle(1, 3, 1.0), GeometryError);
    EXPECT_THROW(build_rectangle(3, 1, 1.0), GeometryError);
}

TEST(BuildRectangle, NonPositiveSpacing) { EXPECT_THROW(build_rectangle(3, 3, 0.0), GeometryError); }

TEST(BuildRectangle, BoundaryNodesTouchInteriorExceptCorners)
{
    const auto d = build_rectangle(5, 4, 1.0);
    std::vector<int> interior_nb(static_cast<std::size_t>(d.node_count()), 0);
    for (const auto& [a, b] : d.edges()) {
        if (!d.is_boundary(b)) ++interior_nb[static_cast<std::size_t>(a)];
        if (!d.is_boundary(a)) ++interior_nb[static_cast<std::size_t>(b)];
    }
    int without = 0;
    for (Index i : d.boundary()) without += interior_nb[static_cast<std::size_t>(i)] == 0;
    EXPECT_EQ(without, 4);
}

TEST(BuildChain, Chain4Matrix)
{
    const auto m = chain4();
    EXPECT_EQ(Mat(m.matrix()), oracle::chain4_s());
    EXPECT_EQ(m.domain().boundary(), (std::vector<Index>{0, 3}));
    EXPECT_EQ(m.domain().interior(), (std::vector<Index>{1, 2}));
}

TEST(BuildChain, Chain4Realizations)
{
    const auto r = realizations(chain4());
    Mat ad(2, 2), an(2, 2);
    ad << 2, -1, -1, 2;
    an << 1, -1, -1, 1;
    EXPECT_LE((r.dirichlet - ad).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((r.neumann - an).cwiseAbs().maxCoeff(), 1e-15);
    const auto sd = spectrum_of(r.dirichlet).eigenvalues, sn = spectrum_of(r.neumann).eigenvalues;
    EXPECT_NEAR(sd[0], 1, 1e-14);
    EXPECT_NEAR(sd[1], 3, 1e-14);
    EXPECT_NEAR(sn[0], 0, 1e-14);
    EXPECT_NEAR(sn[1], 2, 1e-14);
}

TEST(BuildChain, FiveNodePath)
{
    const auto m = assemble(build_chain(5, 1.0));
    EXPECT_EQ(m.n_interior(), 3);
    Mat l = Mat::Zero(5, 5);
    for (int i = 0; i < 4; ++i) {
        l(i, i) += 1;
        l(i + 1, i + 1) += 1;
        l(i, i + 1) = l(i + 1, i) = -1;
    }
    EXPECT_EQ(Mat(m.matrix()), l);
}

TEST(BuildChain, TooShort) { EXPECT_THROW(build_chain(3, 1.0), GeometryError); }

TEST(BuildMasked, FullTwoByTwoEqualsRectangle)
{
    const auto a = build_masked(CellMask(2, std::vector<bool>(2, true)), 0.5);
    const auto b = build_rectangle(2, 2, 0.5);
    ASSERT_EQ(a.node_count(), b.node_count());
    EXPECT_EQ(a.nodes(), b.nodes());
    for (Index i = 0; i < a.node_count(); ++i) EXPECT_EQ(a.is_boundary(i), b.is_boundary(i));
    EXPECT_EQ(Mat(assemble(a).matrix()), Mat(assemble(b).matrix()));
}

TEST(BuildMasked, ThreeCellLHasNoInterior)
{
    // 8 corner nodes, all on the boundary: rejected like any domain without interior.
    const CellMask l{{true, true}, {true, false}};
    EXPECT_THROW(build_masked(l, 1.0), GeometryError);
}

TEST(BuildMasked, TwelveCellLShape)
{
    const auto d = build_masked(lshape_mask(), 0.25);
    // 25 lattice points of the 4x4 square minus the 4 strictly inside the removed block.
    EXPECT_EQ(d.node_count(), 21);
    // Interior by hand: (1,1),(2,1),(3,1),(1,2),(1,3); (2,2) is the re-entrant corner.
    std::vector<LatticePoint> interior;
    for (Index i : d.interior()) interior.push_back(d.nodes()[static_cast<std::size_t>(i)]);
    EXPECT_EQ(interior, (std::vector<LatticePoint>{{1, 1}, {2, 1}, {3, 1}, {1, 2}, {1, 3}}));
}

TEST(BuildMasked, SingleCellRejected) { EXPECT_THROW(build_masked(CellMask{{true}}, 1.0), GeometryError); }

TEST(BuildMasked, DisconnectedRejected)
{
    const CellMask m{{true, true, false, true, true}, {true, true, false, true, true}};
    EXPECT_THROW(build_masked(m, 1.0), GeometryError);
}

TEST(BuildMasked, EmptyRejected) { EXPECT_THROW(build_masked(CellMask{{false, false}}, 1.0), GeometryError); }

TEST(Assemble, PotentialLengthMismatch)
{
    EXPECT_THROW(assemble(build_chain(4, 1.0), Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST(Assemble, TwoByTwoCenter)
{
    const double h = 0.5;
    const auto m = assemble(build_rectangle(2, 2, h));
    ASSERT_EQ(m.s_ii().rows(), 1);
    EXPECT_DOUBLE_EQ(Mat(m.s_ii())(0, 0), 4 / (h * h));
}

TEST(Assemble, ConstantPotentialShifts)
{
    const double c = 2.75;
    const auto base = realizations(assemble(build_rectangle(5, 4, 0.2)));
    const auto shifted = realizations(assemble(build_rectangle(5, 4, 0.2), c));
    const auto d0 = spectrum_of(base.dirichlet, false).eigenvalues, d1 = spectrum_of(shifted.dirichlet, false).eigenvalues;
    const auto n0 = spectrum_of(base.neumann, false).eigenvalues, n1 = spectrum_of(shifted.neumann, false).eigenvalues;
    for (std::size_t k = 0; k < d0.size(); ++k) EXPECT_NEAR(d1[k] - d0[k], c, 1e-11);
    // V also enters S_BB, so the Neumann Schur complement is not a plain shift:
    // S_IB (S_BB + c)^{-1} S_BI <= S_IB S_BB^{-1} S_BI gives A_N(c) >= A_N(0) + c.
    for (std::size_t k = 0; k < n0.size(); ++k) {
        EXPECT_GE(n1[k] - n0[k], c - 1e-11);
        EXPECT_LE(n1[k], d1[k] + 1e-11);
    }
}

TEST(Assemble, NeumannSchurComplementMatchesDenseFormula)
{
    const auto m = assemble(build_rectangle(5, 4, 0.2), 2.75);
    const Mat ii = m.s_ii(), ib = m.s_ib(), bi = m.s_bi(), bb = m.s_bb();
    const Mat an = ii - ib * bb.inverse() * bi;
    EXPECT_LE((realizations(m).neumann - an).cwiseAbs().maxCoeff(), 1e-10 * m.scale());
}

TEST(Assemble, BlocksTransposed)
{
    const auto m = assemble(build_masked(lshape_mask(), 0.25), 1.5);
    EXPECT_EQ(Mat(m.s_ib()), Mat(m.s_bi()).transpose());
    const Mat s = m.matrix();
    EXPECT_EQ(s, s.transpose());
}

TEST(Green, SecondIdentityRandomPairs)
{
    std::mt19937_64 rng(11);
    Eigen::VectorXd v(49);
    for (Index i = 0; i < v.size(); ++i) v(i) = std::sin(static_cast<double>(i));
    const std::vector<DiscreteModel> models{chain4(), assemble(build_rectangle(6, 6, 1.0 / 6), v),
                                            assemble(build_masked(lshape_mask(), 0.25), -3.0)};
    for (const auto& m : models) {
        double worst = 0.0;
        for (int p = 0; p < 1000; ++p) {
            const Vec u = random_vec(rng, m.n_nodes()).normalized(), w = random_vec(rng, m.n_nodes()).normalized();
            // Independent evaluation from the full matrix and the I/B masks.
            const Vec su = m.matrix() * u, sw = m.matrix() * w;
            double lhs = 0.0, rhs = 0.0;
            for (Index i = 0; i < m.n_nodes(); ++i) {
                if (m.domain().is_boundary(i))
                    rhs += u(i) * sw(i) - su(i) * w(i);
                else
                    lhs += su(i) * w(i) - u(i) * sw(i);
            }
            worst = std::max(worst, std::abs(lhs - rhs));
            EXPECT_NEAR(m.green_expression(u, w), lhs - rhs, 1e-12 * m.scale());
        }
        EXPECT_LE(worst, 1e-12 * m.scale());
        EXPECT_LE(m.green_defect_canonical(), 1e-15);
    }
}

TEST(Green, FirstIdentity)
{
    std::mt19937_64 rng(5);
    const auto m = assemble(build_rectangle(4, 3, 0.25), 0.7);
    for (int p = 0; p < 50; ++p) {
        const Vec u = random_vec(rng, m.n_nodes()), v = random_vec(rng, m.n_nodes());
        const Vec s_u = m.stack(u);
        const Vec lv = m.stack(Vec(m.matrix() * v)).head(m.n_interior());
        const double decomposed = lv.dot(s_u.head(m.n_interior())) + conormal(m, v).dot(trace(m, u));
        EXPECT_NEAR(u.dot(m.matrix() * v), decomposed, 1e-10 * m.scale());
    }
}

TEST(Green, CorruptionBreaksIdentity)
{
    const auto bad = corrupt_symmetry(chain4(), 1e-3);
    EXPECT_NEAR(bad.green_defect_canonical(), 1e-3, 1e-15);
}

TEST(Realizations, NeumannExtensionHasZeroConormal)
{
    std::mt19937_64 rng(8);
    const auto m = assemble(build_masked(lshape_mask(), 0.25), 2.0);
    const auto r = realizations(m);
    for (int p = 0; p < 10; ++p) {
        const Vec ui = random_vec(rng, m.n_interior());
        const Vec f = neumann_extension(m, r, ui);
        EXPECT_LE(conormal(m, f).norm(), 1e-12 * m.scale() * ui.norm());
        const Vec interior = m.stack(Vec(m.matrix() * f)).head(m.n_interior());
        EXPECT_LE((interior - r.neumann * ui).norm(), 1e-12 * m.scale() * ui.norm());
    }
}

TEST(Realizations, Chain4NeumannKernelIsConstants)
{
    const auto r = realizations(chain4());
    EXPECT_LE((r.neumann * Vec::Ones(2)).norm(), 1e-15);
}

TEST(Realizations, Rectangle8NeumannKernel)
{
    const auto m = assemble(build_rectangle(8, 8, 1.0 / 8));
    const auto r = realizations(m);
    const auto spec = spectrum_of(r.neumann);
    EXPECT_NEAR(spec.eigenvalues[0], 0.0, 1e-10);
    EXPECT_GT(spec.eigenvalues[1], 1.0);
    const Vec ext = neumann_extension(m, r, spec.eigenvectors.col(0));
    EXPECT_LE((ext / ext(0) - Vec::Ones(m.n_nodes())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Realizations, ShiftMinusFiveOnChain)
{
    const auto r = realizations(chain4(-5.0));
    const auto e = spectrum_of(r.dirichlet).eigenvalues;
    EXPECT_NEAR(e[0], -4, 1e-14);
    EXPECT_NEAR(e[1], -2, 1e-14);
    EXPECT_EQ(r.essinf_potential, -5.0);
    for (double x : spectrum_of(r.neumann).eigenvalues) EXPECT_GE(x, -5.0 - 1e-12);
}

TEST(Realizations, SingularBoundaryBlockRejected)
{
    // CHAIN4 with V = -1 at both ends: S_BB = 0.
    Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
    v(0) = v(3) = -1;
    const auto m = assemble(build_chain(4, 1.0), v);
    EXPECT_THROW(realizations(m), NeumannEliminationError);
}

TEST(Realizations, LowerBoundAndInterlacing)
{
    std::mt19937_64 rng(21);
    for (int t = 0; t < 5; ++t) {
        const auto d = build_rectangle(5 + t, 4, 0.3);
        Vec v = random_vec(rng, d.node_count()).cwiseAbs() * 3.0;
        const auto m = assemble(d, v);
        const auto r = realizations(m);
        const auto sd = spectrum_of(r.dirichlet, false).eigenvalues;
        const auto sn = spectrum_of(r.neumann, false).eigenvalues;
        EXPECT_GE(sd.front(), v.minCoeff() - 1e-8 * m.scale());
        EXPECT_GE(sn.front(), v.minCoeff() - 1e-8 * m.scale());
        EXPECT_GE(sn.front(), -1e-8 * m.scale());  // V >= 0
        for (std::size_t k = 0; k < sd.size(); ++k) EXPECT_LE(sn[k], sd[k] + 1e-10 * m.scale()) << k;
    }
}

TEST(Traces, AffineOnChain)
{
    const auto m = chain4();
    const double a = 0.3, b = -1.7;
    Vec f(4);
    f << a, a + b, a + 2 * b, a + 3 * b;
    const Vec lam = conormal(m, f);
    EXPECT_NEAR(lam(0), -b, 1e-15);
    EXPECT_NEAR(lam(1), b, 1e-15);
    EXPECT_EQ(trace(m, f), Vec(Eigen::Vector2d(a, a + 3 * b)));
}

TEST(Traces, ConstantsHaveZeroConormal)
{
    const auto m = assemble(build_masked(lshape_mask(), 0.25));
    EXPECT_LE(conormal(m, Vec::Constant(m.n_nodes(), 2.5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Traces, DirichletEigenvectorZeroExtension)
{
    const auto m = chain4();
    const Vec g = Vec::Ones(2);
    const Vec sbig = m.s_bi() * g;
    EXPECT_EQ(sbig, Vec(Eigen::Vector2d(-1, -1)));
}

TEST(Traces, LengthMismatch)
{
    EXPECT_THROW(conormal(chain4(), Vec::Zero(3)), DimensionError);
    EXPECT_THROW(trace(chain4(), Vec::Zero(5)), DimensionError);
}

TEST(SpectrumOf, Chain4Dirichlet)
{
    const auto s = spectrum_of(realizations(chain4()).dirichlet);
    EXPECT_NEAR(s.eigenvalues[0], 1, 1e-14);
    EXPECT_NEAR(s.eigenvalues[1], 3, 1e-14);
    EXPECT_TRUE(s.has_vectors());
}

TEST(SpectrumOf, UnitSquare32)
{
    const double h = 1.0 / 32, pi = std::numbers::pi;
    const auto r = realizations(assemble(build_rectangle(32, 32, h)));
    const double lowest = spectrum_of(r.dirichlet, false).eigenvalues.front();
    const double closed = 8 / (h * h) * std::pow(std::sin(pi * h / 2), 2);
    EXPECT_NEAR(lowest, closed, 1e-9 * closed);
    EXPECT_LE(std::abs(lowest - 2 * pi * pi) / (2 * pi * pi), 3e-3);
}

TEST(SpectrumOf, Diagonal)
{
    const auto s = spectrum_of(Mat::Constant(1, 1, 5.0));
    ASSERT_EQ(s.eigenvalues.size(), 1u);
    EXPECT_EQ(s.eigenvalues[0], 5.0);
}

TEST(SpectrumOf, AsymmetricRejected)
{
    Mat a(2, 2);
    a << 1, 1e-6, 0, 1;
    EXPECT_THROW(spectrum_of(a), AsymmetryError);
}
