#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sporder/ensembles.hpp"
#include "sporder/matrix.hpp"
#include "sporder/random.hpp"

using namespace sporder;
using oracle::diag;
using oracle::mat2;

namespace {

double unitarity(const ComplexMatrix& u)
{
    return (u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols())).norm();
}

double strict_lower(const ComplexMatrix& r)
{
    double s = 0.0;
    for (Eigen::Index j = 0; j < r.cols(); ++j)
        for (Eigen::Index i = j + 1; i < r.rows(); ++i)
            s += std::norm(r(i, j));
    return std::sqrt(s);
}

}  // namespace

TEST(Matrix, RejectsNonFinite)
{
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    m(0, 1) = Complex(std::nan(""), 0.0);
    EXPECT_THROW(require_valid(m), std::invalid_argument);
    EXPECT_THROW(require_valid(ComplexMatrix(0, 0)), std::invalid_argument);
    EXPECT_THROW(require_valid(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST(Matrix, NormalizedTrace)
{
    EXPECT_EQ(normalized_trace(ComplexMatrix::Identity(5, 5)), Complex(1.0));
    EXPECT_EQ(normalized_trace(diag({1.0, 2.0})), Complex(1.5));
}

TEST(Matrix, FkDeterminantExamples)
{
    EXPECT_NEAR(fk_determinant(diag({2.0, 8.0})), 4.0, 1e-14);
    EXPECT_EQ(fk_determinant(oracle::jordan(2, 0.0)), 0.0);
    EXPECT_NEAR(fk_determinant(mat2(1, 5, 0, 2)), std::sqrt(2.0), 1e-14);
}

TEST(Matrix, FkDeterminantAgreesWithLu)
{
    Rng rng(11);
    for (int n : {1, 3, 7, 16}) {
        const ComplexMatrix t = rng.complex_gaussian_matrix(n, n);
        const double lu = std::pow(std::abs(t.partialPivLu().determinant()), 1.0 / n);
        EXPECT_NEAR(fk_determinant(t) / lu, 1.0, 1e-12) << n;
    }
}

TEST(Matrix, FkDeterminantIsMultiplicative)
{
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix s = rng.complex_gaussian_matrix(6, 6), t = rng.complex_gaussian_matrix(6, 6);
        EXPECT_NEAR(fk_determinant(s * t) / (fk_determinant(s) * fk_determinant(t)), 1.0, 1e-9);
    }
}

TEST(Matrix, OperatorNormMatchesSvd)
{
    Rng rng(13);
    const ComplexMatrix t = rng.complex_gaussian_matrix(9, 9);
    Eigen::JacobiSVD<ComplexMatrix> svd(t);
    EXPECT_NEAR(operator_norm(t), svd.singularValues()(0), 1e-12);
    EXPECT_EQ(operator_norm(ComplexMatrix::Zero(3, 3)), 0.0);
}

TEST(Matrix, PowerGrowthExamples)
{
    const auto j = power_growth(oracle::jordan(3, 0.0), 3);
    ASSERT_EQ(j.size(), 3u);
    EXPECT_EQ(j[2], 0.0);

    const ComplexMatrix u = diag({Complex(0, 1), -1.0, Complex(std::cos(0.3), std::sin(0.3))});
    for (double v : power_growth(u, 10))
        EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Matrix, PowerGrowthMatchesPerPowerSvd)
{
    Rng rng(14);
    ComplexMatrix t = rng.complex_gaussian_matrix(16, 16).triangularView<Eigen::StrictlyUpper>();
    const auto g = power_growth(t, 16);
    ComplexMatrix p = ComplexMatrix::Identity(16, 16);
    for (int m = 1; m <= 16; ++m) {
        p = p * t;
        Eigen::JacobiSVD<ComplexMatrix> svd(p);
        const double expect = std::pow(svd.singularValues()(0), 1.0 / m);
        EXPECT_NEAR(g[static_cast<std::size_t>(m - 1)], expect, 1e-9 * std::max(1.0, expect)) << m;
    }
    EXPECT_LE(g.back(), 1e-6);
}

TEST(Matrix, PowerGrowthApproachesSpectralRadius)
{
    const ComplexMatrix t = mat2(0.5, 3.0, 0.0, -0.9);
    EXPECT_NEAR(power_growth(t, 200).back(), 0.9, 0.05);
}

TEST(Matrix, SchurExamples)
{
    const SchurForm d = schur_form(diag({1.0, 2.0}));
    EXPECT_LE((d.reconstruct() - diag({1.0, 2.0})).norm(), 1e-14);
    EXPECT_LE(multiset_distance(d.diag_order(), std::vector<Complex>{1.0, 2.0}), 1e-14);

    const SchurForm j = schur_form(oracle::jordan(2, 0.0));
    EXPECT_LE((j.triangular - oracle::jordan(2, 0.0)).norm(), 1e-14);
}

TEST(Matrix, SchurGinibreAgainstCharacteristicPolynomial)
{
    const ComplexMatrix t = sample(EnsembleSpec::parse("ginibre:n=6,seed=7"));
    const SchurForm s = schur_form(t);
    EXPECT_LE((s.reconstruct() - t).norm() / t.norm(), 1e-10);
    EXPECT_LE(unitarity(s.unitary), 1e-12 * 6);
    EXPECT_LE(strict_lower(s.triangular), 1e-10 * s.triangular.norm());
    const auto roots = oracle::poly_roots(oracle::char_poly(t));
    EXPECT_LE(multiset_distance(s.diag_order(), roots), 1e-8);
}

TEST(Matrix, SchurInvariantsOnRandomMatrices)
{
    Rng rng(15);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(0, 31));
        const ComplexMatrix t = rng.complex_gaussian_matrix(n, n);
        const SchurForm s = schur_form(t);
        ASSERT_LE((s.reconstruct() - t).norm() / t.norm(), 1e-10) << trial;
        ASSERT_LE(unitarity(s.unitary), 1e-12 * n) << trial;
        ASSERT_LE(strict_lower(s.triangular), 1e-10 * s.triangular.norm()) << trial;
    }
}

TEST(Matrix, ReorderDiagonal)
{
    const SchurForm s = schur_form(diag({2.0, 1.0}));
    const ComplexCompare lex = [](Complex a, Complex b) {
        if (a.real() != b.real())
            return a.real() < b.real() ? std::weak_ordering::less : std::weak_ordering::greater;
        return a.imag() < b.imag() ? std::weak_ordering::less
               : a.imag() > b.imag() ? std::weak_ordering::greater
                                     : std::weak_ordering::equivalent;
    };
    const SchurForm r = reorder_schur(s, lex, 1e-8);
    EXPECT_NEAR(std::abs(r.triangular(0, 0) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r.triangular(1, 1) - 2.0), 0.0, 1e-14);
    EXPECT_LE((r.reconstruct() - diag({2.0, 1.0})).norm(), 1e-14);

    // already sorted: unchanged
    const SchurForm again = reorder_schur(r, lex, 1e-8);
    EXPECT_EQ(again.triangular, r.triangular);
    EXPECT_EQ(again.unitary, r.unitary);
}

TEST(Matrix, ReorderPutsTwoFirst)
{
    const ComplexMatrix t = mat2(1, 1, 0, 2);
    const SchurForm r = reorder_by_rank(schur_form(t), {1, 0});
    EXPECT_NEAR(std::abs(r.triangular(0, 0) - 2.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r.triangular(1, 1) - 1.0), 0.0, 1e-14);
    // the first Schur vector is the eigenvector (1,1)/sqrt2 up to phase
    ComplexVector e(2);
    e << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(e.dot(r.unitary.col(0))), 1.0, 1e-14);
    EXPECT_LE((r.reconstruct() - t).norm(), 1e-14);
}

TEST(Matrix, ReorderPreservesSpectrum)
{
    Rng rng(16);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(0, 14));
        const ComplexMatrix t = rng.complex_gaussian_matrix(n, n);
        const SchurForm s = schur_form(t);
        std::vector<int> rank(static_cast<std::size_t>(n));
        for (auto& r : rank)
            r = static_cast<int>(rng.uniform_int(0, n));
        const SchurForm r = reorder_by_rank(s, rank);
        EXPECT_LE(multiset_distance(r.diag_order(), s.diag_order()), 1e-8);
        EXPECT_LE((r.reconstruct() - t).norm() / t.norm(), 1e-10);
        EXPECT_LE(strict_lower(r.triangular), 1e-10 * r.triangular.norm());
    }
}

TEST(Matrix, ReorderSkipsClusteredSwap)
{
    ComplexMatrix t = mat2(1.0 + 1e-12, 1.0, 0.0, 1.0);
    std::vector<SkippedSwap> skipped;
    const ComplexCompare by_real = [](Complex a, Complex b) {
        return a.real() < b.real() ? std::weak_ordering::less
               : a.real() > b.real() ? std::weak_ordering::greater
                                     : std::weak_ordering::equivalent;
    };
    const SchurForm r = reorder_schur(schur_form(t), by_real, 1e-8, &skipped);
    EXPECT_EQ(skipped.size(), 1u);
    EXPECT_LE((r.reconstruct() - t).norm(), 1e-14);
}

TEST(Matrix, Clustering)
{
    const std::vector<Complex> v{0.0, 1.0, 1e-9, 2.0, 1.0 + 5e-9, 1.0 + 1e-8};
    const auto c = cluster_values(v, 1e-8);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0].members, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(c[1].members, (std::vector<std::size_t>{1, 4, 5}));
    EXPECT_EQ(c[2].members, (std::vector<std::size_t>{3}));
    EXPECT_NEAR(c[1].center.real(), 1.0 + 5e-9, 1e-15);
    EXPECT_DOUBLE_EQ(clustering_threshold(0.5), 1e-8);
    EXPECT_DOUBLE_EQ(clustering_threshold(4.0), 4e-8);
}

TEST(Matrix, MultisetDistance)
{
    const std::vector<Complex> a{1.0, 2.0, 3.0}, b{3.0, 1.0, 2.1};
    EXPECT_NEAR(multiset_distance(a, b), 0.1, 1e-12);
    EXPECT_TRUE(std::isinf(multiset_distance(a, std::vector<Complex>{1.0})));
}

TEST(Matrix, ProjectionDefect)
{
    EXPECT_EQ(projection_defect(diag({1.0, 0.0})), 0.0);
    EXPECT_GT(projection_defect(mat2(1, 1, 0, 0)), 0.5);
}
