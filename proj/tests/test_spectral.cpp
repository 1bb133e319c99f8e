#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sporder/ensembles.hpp"
#include "sporder/random.hpp"
#include "sporder/spectral.hpp"

using namespace sporder;
using oracle::diag;
using oracle::mat2;

namespace {

SpectralTable table_for(const std::string& ensemble, const std::string& curve)
{
    const ComplexMatrix t = sample(EnsembleSpec::parse(ensemble));
    return build_spectral_table(t, OrderingCurve::parse(curve, curve_radius_for(t)));
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

}  // namespace

TEST(Spectral, TableInvariants)
{
    for (const auto& [ens, curve] : std::vector<std::pair<std::string, std::string>>{
             {"ginibre:n=12,seed=6", "hilbert"},
             {"normal_plus_nilpotent:n=10,seed=2", "morton"},
             {"diag_perturb:n=9,seed=44,eps=0,levels=9,pattern=edges", "lex"},
             {"jordan:n=5,seed=0,lambda=0.5", "hilbert"}}) {
        const SpectralTable tb = table_for(ens, curve);
        const Eigen::Index n = tb.n();
        ComplexMatrix sum = ComplexMatrix::Zero(n, n);
        double weights = 0.0;
        for (std::size_t c = 0; c < tb.cluster_count(); ++c) {
            sum += tb.cluster_projs[c];
            weights += tb.weight(c);
            if (c > 0) {
                EXPECT_LT(tb.params[c - 1], tb.params[c]) << ens;
                // flags increase
                EXPECT_LE((tb.flags[c - 1] - tb.flags[c - 1] * tb.flags[c]).norm(), 1e-9) << ens;
            }
            for (std::size_t d = c + 1; d < tb.cluster_count(); ++d)
                EXPECT_LE((tb.cluster_projs[c] * tb.cluster_projs[d]).norm(), 1e-9) << ens;
            EXPECT_LE(invariance_defect(tb.t, tb.flags[c]), 1e-9 * std::max(1.0, tb.norm)) << ens;
        }
        EXPECT_LE((sum - identity(n)).norm(), 1e-9) << ens;
        EXPECT_NEAR(weights, 1.0, 1e-15) << ens;
    }
}

TEST(Spectral, CurveMustSeparateTheSpectrum)
{
    const ComplexMatrix t = diag({0.01, 0.02, 1.0});
    EXPECT_THROW(build_spectral_table(t, OrderingCurve::parse("hilbert:depth=2", 1.0)), CurveSeparationError);
    EXPECT_NO_THROW(build_spectral_table(t, OrderingCurve::parse("hilbert:depth=12", 1.0)));
}

TEST(Spectral, PullbackMass)
{
    const ComplexMatrix t = diag({1.0, 2.0});
    const SpectralTable tb = build_spectral_table(t, OrderingCurve(CurveKind::Lexicographic, 2.0));
    EXPECT_DOUBLE_EQ(pullback_mass(tb, {ParamInterval::closed(Dyadic::zero(), Dyadic::one())}), 1.0);
    EXPECT_DOUBLE_EQ(pullback_mass(tb, {}), 0.0);
    const Dyadic t1 = OrderingCurve(CurveKind::Lexicographic, 2.0).min_preimage(1.0);
    EXPECT_EQ(tb.params[0], t1);
    EXPECT_DOUBLE_EQ(pullback_mass(tb, {ParamInterval::closed(t1, t1)}), 0.5);
    EXPECT_DOUBLE_EQ(pullback_mass(tb, {ParamInterval::open(t1, tb.params[1])}), 0.0);
}

TEST(Spectral, FlagProjections)
{
    const ComplexMatrix t = diag({2.0, 1.0});
    const SpectralTable tb = build_spectral_table(t, OrderingCurve(CurveKind::Lexicographic, 2.0));
    EXPECT_LE((flag_projection(tb, Dyadic::one()).matrix - identity(2)).norm(), 1e-15);
    EXPECT_EQ(flag_projection(tb, Dyadic::zero()).rank, 0);
    const Projection first = flag_projection(tb, tb.params[0]);
    EXPECT_EQ(first.rank, 1);
    EXPECT_LE((first.matrix - diag({0.0, 1.0})).norm(), 1e-15);  // eigenvalue 1 sits at position 2
    EXPECT_EQ(open_flag_projection(tb, tb.params[0]).rank, 0);
}

TEST(Spectral, OpenSetProjections)
{
    const ComplexMatrix t = diag({1.0, 2.0});
    const SpectralTable tb = build_spectral_table(t, OrderingCurve(CurveKind::Lexicographic, 2.0));
    const Dyadic a = tb.params[0], b = tb.params[1];
    const Dyadic eps = Dyadic::pow2(70);
    EXPECT_EQ(open_set_projection(tb, {ParamInterval::closed(Dyadic::zero(), Dyadic::one())}).rank, 2);
    const auto both = open_set_projection(
        tb, {ParamInterval::open(a.minus_sat(eps), a.plus_sat(eps)), ParamInterval::open(b.minus_sat(eps), b.plus_sat(eps))});
    EXPECT_LE((both.matrix - identity(2)).norm(), 1e-15);
    const auto one = open_set_projection(tb, {ParamInterval::open(a.minus_sat(eps), a.plus_sat(eps))});
    EXPECT_EQ(one.rank, 1);
    EXPECT_LE((one.matrix - diag({1.0, 0.0})).norm(), 1e-15);
    // an open interval ending exactly at a parameter misses it
    EXPECT_EQ(open_set_projection(tb, {ParamInterval::open(Dyadic::zero(), a)}).rank, 0);
    EXPECT_EQ(open_set_projection(tb, {ParamInterval{Dyadic::zero(), a.plus_sat(eps), true, false}}).rank, 1);

    EXPECT_THROW(open_set_projection(tb, {ParamInterval::open(b, a)}), std::invalid_argument);
    EXPECT_THROW(open_set_projection(tb, {ParamInterval::closed(a, b)}), std::invalid_argument);
    EXPECT_THROW(open_set_projection(tb, {ParamInterval::open(Dyadic::zero(), b), ParamInterval::open(a, Dyadic::one())}),
                 std::invalid_argument);
}

TEST(Spectral, SpectralProjectionAgainstEigenspaces)
{
    const SpectralTable tb = table_for("ginibre:n=12,seed=6", "hilbert");
    const Eigen::Index n = tb.n();
    EXPECT_LE((spectral_projection(tb, Region::all()).matrix - identity(n)).norm(), 1e-12);
    EXPECT_EQ(spectral_projection(tb, Region::none()).rank, 0);
    // oracle: sum of consecutive differences of eigenspace-prefix projections
    std::vector<ComplexMatrix> prefix{ComplexMatrix::Zero(n, n)};
    for (std::size_t c = 0; c < tb.cluster_count(); ++c) {
        const std::vector<Complex> head(tb.centers.begin(), tb.centers.begin() + static_cast<long>(c) + 1);
        prefix.push_back(oracle::generalized_eigenprojection(tb.t, head, std::vector<int>(c + 1, 1)));
    }
    Rng rng(61);
    for (int i = 0; i < 50; ++i) {
        const Region b = Region::disk(Complex(2 * rng.uniform() - 1, 2 * rng.uniform() - 1), rng.uniform());
        const Projection e = spectral_projection(tb, b, BoundaryPolicy::ByCenter);
        const Projection direct = spectral_projection_direct(tb, b, BoundaryPolicy::ByCenter);
        ComplexMatrix expected = ComplexMatrix::Zero(n, n);
        int rank = 0;
        for (std::size_t c = 0; c < tb.cluster_count(); ++c)
            if (b.contains(tb.centers[c])) {
                expected += prefix[c + 1] - prefix[c];
                ++rank;
            }
        EXPECT_EQ(e.rank, rank);
        EXPECT_LE((e.matrix - direct.matrix).norm(), 1e-12);
        EXPECT_LE((e.matrix - expected).norm(), 1e-9);
    }
}

TEST(Spectral, FlagIdentityAtRandomParameters)
{
    const SpectralTable tb = table_for("normal_plus_nilpotent:n=8,seed=32", "morton");
    const SpectralAnalysis a = analyze(tb.t);
    Rng rng(62);
    for (int i = 0; i < 20; ++i) {
        const Dyadic t = Dyadic::from_index(rng.bits(), 64);
        const Region prefix = Region::curve_prefix(tb.curve, t);
        const Projection e = spectral_projection(tb, prefix, BoundaryPolicy::ByCenter);
        EXPECT_LE((e.matrix - hs_projection(a, prefix, BoundaryPolicy::ByCenter).matrix).norm(), 1e-9);
        EXPECT_LE((e.matrix - flag_projection(tb, t).matrix).norm(), 1e-12);
    }
}

TEST(Spectral, DyadicCells)
{
    const auto zero = dyadic_cells(1.0, 0);
    ASSERT_EQ(zero.size(), 1u);
    EXPECT_TRUE(zero[0].contains(Complex(1.5, 1.5)));
    EXPECT_TRUE(zero[0].contains(Complex(-1.5, -1.5)));
    const auto one = dyadic_cells(1.0, 1);
    ASSERT_EQ(one.size(), 4u);
    EXPECT_TRUE(one[0].contains(Complex(-1.0, 1.0)));
    EXPECT_THROW(dyadic_cells(1.0, 16), std::invalid_argument);
}

TEST(Spectral, DyadicExpectationOfDiagonal)
{
    const ComplexMatrix t = diag({1.0, 2.0});
    const SpectralTable tb = build_spectral_table(t, OrderingCurve(CurveKind::Hilbert, 2.0));
    // level 1: both eigenvalues share the cell [0, 3) x (-3, 0]
    EXPECT_LE((dyadic_expectation(tb, 1) - 1.5 * identity(2)).norm(), 1e-15);
    // level 2: cells of side 1.5 separate them
    EXPECT_LE((dyadic_expectation(tb, 2) - t).norm(), 1e-15);
    EXPECT_LE((abelian_expectation(tb) - t).norm(), 1e-15);
}

TEST(Spectral, DyadicExpectationConvergesForNormalMatrices)
{
    Rng rng(63);
    const ComplexMatrix u = ComplexMatrix(rng.complex_gaussian_matrix(6, 6).householderQr().householderQ());
    const ComplexMatrix d = diag({0.1, Complex(0.5, 0.3), -0.7, Complex(0.0, -0.9), 0.8, Complex(-0.2, 0.6)});
    const ComplexMatrix t = u * d * u.adjoint();
    const SpectralTable tb = build_spectral_table(t, OrderingCurve(CurveKind::Hilbert, curve_radius_for(t)));
    const double r = tb.radius;
    for (int level = 1; level <= 10; ++level) {
        const ComplexMatrix e = dyadic_expectation(tb, level);
        EXPECT_LE(operator_norm(abelian_expectation(tb) - e), 3.0 * std::sqrt(2.0) * r / std::ldexp(1.0, level));
        EXPECT_NEAR(std::abs(normalized_trace(e) - normalized_trace(t)), 0.0, 1e-14);
    }
    EXPECT_LE((dyadic_expectation(tb, 12) - t).norm(), 1e-12);
}

TEST(Spectral, DecomposeWorkedExample)
{
    const ComplexMatrix t = mat2(1, 1, 0, 2);
    const double radius = curve_radius_for(t);

    const Decomposition up = decompose(t, OrderingCurve::parse("lex", radius));
    EXPECT_LE((up.n - diag({1.0, 2.0})).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((up.q - mat2(0, 1, 0, 0)).cwiseAbs().maxCoeff(), 1e-10);

    // second ordering: the eigenvector u = (1,1)/sqrt2 of 2 spans the first flag
    ComplexVector u(2);
    u << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const ComplexMatrix e2 = u * u.adjoint();
    const ComplexMatrix n_oracle = 2.0 * e2 + 1.0 * (identity(2) - e2);
    const Decomposition down = decompose(t, OrderingCurve::parse("lex:mirror", radius));
    EXPECT_LE((down.n - n_oracle).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((down.n - mat2(1.5, 0.5, 0.5, 1.5)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((down.q - mat2(-0.5, 0.5, -0.5, 0.5)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((down.q * down.q).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(measure_distance(empirical_brown(up.n), empirical_brown(down.n)) <= 1e-12, true);
}

TEST(Spectral, DecomposeSpecialCases)
{
    const Decomposition j = decompose(oracle::jordan(4, 2.0), OrderingCurve(CurveKind::Hilbert, 3.0));
    EXPECT_LE((j.n - 2.0 * identity(4)).norm(), 1e-12);
    EXPECT_LE((j.q - oracle::jordan(4, 0.0)).norm(), 1e-12);

    Rng rng(64);
    const ComplexMatrix u = ComplexMatrix(rng.complex_gaussian_matrix(5, 5).householderQr().householderQ());
    const ComplexMatrix normal = u * diag({1.0, -1.0, Complex(0, 1), 0.5, Complex(-0.3, -0.4)}) * u.adjoint();
    const Decomposition d = decompose(normal, OrderingCurve(CurveKind::Morton, curve_radius_for(normal)));
    EXPECT_LE((d.n - normal).norm(), 1e-12);
    EXPECT_LE(d.q.norm(), 1e-12);
}

TEST(Spectral, DecomposeGinibre)
{
    for (const char* curve : {"hilbert", "morton"}) {
        const SpectralTable tb = table_for("ginibre:n=32,seed=7", curve);
        const Decomposition d = decompose(tb.t, tb.curve);
        EXPECT_LE((d.n + d.q - tb.t).norm(), 1e-14 * tb.t.norm());
        EXPECT_LE((d.n * d.n.adjoint() - d.n.adjoint() * d.n).norm(), 1e-9 * d.n.squaredNorm());
        EXPECT_LE(measure_distance(empirical_brown(d.n), empirical_brown(tb.t)), 1e-8);
        const TriangularResidual r = nilpotent_residual(d);
        EXPECT_LE(r.diagonal, 1e-8 * std::max(1.0, tb.norm));
        EXPECT_LE(r.strict_lower, 1e-10 * std::max(1.0, tb.norm));
        // Q is strictly upper triangular in the ordered Schur basis
        const ComplexMatrix q = tb.schur.unitary.adjoint() * d.q * tb.schur.unitary;
        EXPECT_LE(ComplexMatrix(q.triangularView<Eigen::Lower>()).norm(), 1e-10 * tb.norm);
    }
}

TEST(Spectral, BlockDiagonalExpectation)
{
    Rng rng(65);
    ComplexMatrix t = rng.complex_gaussian_matrix(5, 5);
    t.bottomLeftCorner(3, 2).setZero();
    const ComplexMatrix p = diag({1.0, 1.0, 0.0, 0.0, 0.0});
    const ComplexMatrix x = block_diagonal_expectation(t, {p, identity(5) - p});
    ComplexMatrix expect = t;
    expect.topRightCorner(2, 3).setZero();
    EXPECT_LE((x - expect).norm(), 1e-15);
    for (int i = 0; i < 20; ++i) {
        const Complex lambda = rng.complex_gaussian();
        EXPECT_NEAR(fk_determinant(t - lambda * identity(5)) / fk_determinant(x - lambda * identity(5)), 1.0, 1e-8);
    }
    const ComplexMatrix d = diag({1.0, 2.0, 3.0});
    EXPECT_EQ(block_diagonal_expectation(d, {diag({1.0, 0.0, 0.0}), diag({0.0, 1.0, 0.0}), diag({0.0, 0.0, 1.0})}), d);
    const ComplexMatrix j = block_diagonal_expectation(oracle::jordan(2, 0.0), {diag({1.0, 0.0}), diag({0.0, 1.0})});
    EXPECT_EQ(j, ComplexMatrix::Zero(2, 2));
    EXPECT_EQ(fk_determinant(j), 0.0);
    EXPECT_EQ(fk_determinant(oracle::jordan(2, 0.0)), 0.0);
}

TEST(Spectral, BlockDiagonalExpectationKeepsShiftedDeterminants)
{
    const SpectralTable tb = table_for("ginibre:n=16,seed=7", "hilbert");
    const ComplexMatrix x = block_diagonal_expectation(tb);
    Rng rng(66);
    for (int i = 0; i < 20; ++i) {
        const Complex lambda(3 * rng.uniform() - 1.5, 3 * rng.uniform() - 1.5);
        const Eigen::Index n = tb.n();
        EXPECT_NEAR(std::expm1(log_fk_determinant(tb.t - lambda * identity(n)) -
                               log_fk_determinant(x - lambda * identity(n))),
                    0.0, 1e-8);
    }
}
