#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sporder/brown.hpp"
#include "sporder/matrix.hpp"
#include "sporder/region.hpp"

namespace sporder {

/// Orthogonal projection together with its rank (trace = rank / n).
struct Projection {
    ComplexMatrix matrix;
    int rank = 0;

    Eigen::Index size() const { return matrix.rows(); }
    double trace() const { return static_cast<double>(rank) / static_cast<double>(matrix.rows()); }
};

/// How a spectral cluster is assigned to a region.
enum class BoundaryPolicy {
    Strict,    // every member must agree with the center, else RegionAmbiguity
    ByCenter,  // the center decides
};

/// Schur form plus eigenvalue clusters, computed once and reused across regions.
struct SpectralAnalysis {
    SchurForm schur;
    std::vector<Cluster> clusters;  // members index diagonal positions of schur
    double norm = 0.0;
    double delta = 0.0;

    Eigen::Index n() const { return schur.triangular.rows(); }
};

SpectralAnalysis analyze(const ComplexMatrix& t);

/// Schur form with the eigenvalues in b moved to the front; the first `rank`
/// Schur vectors span the invariant subspace.
struct InvariantSplit {
    SchurForm schur;
    int rank = 0;

    Projection projection() const;
    ComplexMatrix range() const { return schur.unitary.leftCols(rank); }
    ComplexMatrix corange() const { return schur.unitary.rightCols(schur.unitary.cols() - rank); }
};

InvariantSplit hs_split(const SpectralAnalysis& a, const Region& b, BoundaryPolicy policy = BoundaryPolicy::Strict);

/// Projection onto the invariant subspace of the eigenvalues in b: the span
/// of the leading Schur vectors after moving those eigenvalues to the front.
Projection hs_projection(const ComplexMatrix& t, const Region& b, BoundaryPolicy policy = BoundaryPolicy::Strict);
Projection hs_projection(const SpectralAnalysis& a, const Region& b, BoundaryPolicy policy = BoundaryPolicy::Strict);

/// Same subspace, with the clusters inside and outside b arranged by the
/// given ranks (lower rank first). Used to test ordering independence.
Projection hs_projection_ordered(const SpectralAnalysis& a, const std::vector<bool>& inside,
                                 const std::vector<int>& cluster_rank);

/// Orthonormal basis of range(P), one column per unit eigenvalue.
ComplexMatrix range_basis(const Projection& p);

enum class Corner { Inside, Outside };

/// Eigenvalue counting measure of T compressed to range(P) or range(I - P).
/// Throws std::invalid_argument when that corner is zero.
PointMeasure compression_brown(const ComplexMatrix& t, const Projection& p, Corner corner);

/// ||(I - P) T P||_F.
double invariance_defect(const ComplexMatrix& t, const ComplexMatrix& p);

struct GrowthReport {
    bool skipped = false;
    bool pass = true;
    double radius = 0.0;
    double inside_max = 0.0;   // largest ||T^m xi||^{1/m} over xi in range(P)
    double outside_min = 0.0;  // smallest over generic xi, when eigenvalues lie outside
    double outside_bound = 0.0;
    std::string note;
};

/// Local growth rate of random vectors at m = m_max, inside and outside the
/// projection onto the closed ball of radius r.
GrowthReport ball_growth_check(const ComplexMatrix& t, double r, int trials, int m_max, std::uint64_t seed);

/// ||T^m xi||^{1/m}, computed on a running normalization.
double local_growth(const ComplexMatrix& t, const ComplexVector& xi, int m);

struct HyperinvarianceReport {
    bool pass = true;
    int accepted = 0;
    int rejected = 0;           // samples whose commutator exceeded tolerance
    double worst_leak = 0.0;    // max ||(I - P) S P||_F / ||S||
    double worst_commutator = 0.0;
    bool partial_commutant = false;  // some cluster block was not scalar
    std::string note;
};

/// Samples operators S commuting with T: random polynomials in T and
/// block-diagonal operators in a basis that splits T along its clusters.
HyperinvarianceReport hyperinvariance_check(const ComplexMatrix& t, const Projection& p, int samples,
                                            std::uint64_t seed);

/// Solves A Z - Z B = C for upper triangular A, B with disjoint diagonals.
ComplexMatrix solve_triangular_sylvester(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c);

}  // namespace sporder
