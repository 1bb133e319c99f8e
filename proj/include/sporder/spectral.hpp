#pragma once

#include <stdexcept>
#include <vector>

#include "sporder/curve.hpp"
#include "sporder/dyadic.hpp"
#include "sporder/projection.hpp"
#include "sporder/region.hpp"

namespace sporder {

/// Eigenvalue clusters of T in curve order, with the chain of invariant
/// projections they generate.
struct SpectralTable {
    ComplexMatrix t;
    OrderingCurve curve;
    double norm = 0.0;
    double radius = 0.0;  // grid radius: ||T||, or 1 for T = 0
    double delta = 0.0;
    SchurForm schur;                    // diagonal grouped by cluster, clusters in curve order
    std::vector<Complex> centers;       // cluster means
    std::vector<Eigen::Index> offsets;  // cluster c occupies positions [offsets[c], offsets[c+1])
    std::vector<Dyadic> params;         // minimal preimage of each center
    std::vector<ComplexMatrix> flags;   // flags[c]: projection onto the first c + 1 clusters
    std::vector<ComplexMatrix> cluster_projs;

    std::size_t cluster_count() const { return centers.size(); }
    Eigen::Index n() const { return t.rows(); }
    int multiplicity(std::size_t c) const { return static_cast<int>(offsets[c + 1] - offsets[c]); }
    double weight(std::size_t c) const { return static_cast<double>(multiplicity(c)) / static_cast<double>(n()); }
    /// Members of cluster c as eigenvalues (diagonal entries of schur).
    std::vector<Complex> members(std::size_t c) const;
};

/// The curve puts two spectral clusters in one cell, or misses one.
class CurveSeparationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws CurveSeparationError listing the problems when the curve does not
/// separate the spectrum.
SpectralTable build_spectral_table(const ComplexMatrix& t, const OrderingCurve& curve);

/// Interval of curve parameters with explicit endpoint closure.
struct ParamInterval {
    Dyadic lo, hi;
    bool lo_closed = false;
    bool hi_closed = false;

    bool contains(Dyadic s) const;
    static ParamInterval open(Dyadic lo, Dyadic hi) { return {lo, hi, false, false}; }
    static ParamInterval closed(Dyadic lo, Dyadic hi) { return {lo, hi, true, true}; }
};

/// Total weight of clusters whose parameter lies in the union.
double pullback_mass(const SpectralTable& table, const std::vector<ParamInterval>& intervals);

/// Projection onto the clusters with parameter <= t.
Projection flag_projection(const SpectralTable& table, Dyadic t);
/// Projection onto the clusters with parameter < t.
Projection open_flag_projection(const SpectralTable& table, Dyadic t);

/// Sum over components of flag differences. Components must be open, except
/// that a component may be closed at 0 ([0, b)) or at 1 ((a, 1]); [0, 1] is
/// accepted on its own. Overlapping components are rejected.
Projection open_set_projection(const SpectralTable& table, const std::vector<ParamInterval>& components);

/// Clusters (by index) assigned to b under the given policy.
std::vector<std::size_t> clusters_in(const SpectralTable& table, const Region& b,
                                     BoundaryPolicy policy = BoundaryPolicy::Strict);

/// Cover stabilization: open covers of the parameters of clusters in b by
/// intervals of radius 2^-l, refined until the covered clusters are exactly
/// those in b and three consecutive levels give the same projection.
Projection spectral_projection(const SpectralTable& table, const Region& b,
                               BoundaryPolicy policy = BoundaryPolicy::Strict);

/// Sum of cluster projections of the clusters in b.
Projection spectral_projection_direct(const SpectralTable& table, const Region& b,
                                      BoundaryPolicy policy = BoundaryPolicy::Strict);

/// The 4^level grid cells of the square of side 3R, k = 1..4^level.
std::vector<Region> dyadic_cells(double radius, int level);

/// Sum over occupied level-n cells A of tau(E(A) T E(A)) / tau(E(A)) E(A).
ComplexMatrix dyadic_expectation(const SpectralTable& table, int level);
/// Same cells and projections applied to another operand x, with the grid
/// square of radius `radius` (it must contain the spectrum).
ComplexMatrix dyadic_expectation(const SpectralTable& table, const ComplexMatrix& x, int level, double radius);

/// Limit of dyadic_expectation as the level grows: every cluster alone.
ComplexMatrix abelian_expectation(const SpectralTable& table);
ComplexMatrix abelian_expectation(const SpectralTable& table, const ComplexMatrix& x);

/// Sum over clusters of E(z) T E(z).
ComplexMatrix block_diagonal_expectation(const SpectralTable& table);
/// Sum of P T P over a family of pairwise orthogonal projections.
ComplexMatrix block_diagonal_expectation(const ComplexMatrix& t, const std::vector<ComplexMatrix>& projections);

struct Decomposition {
    ComplexMatrix n;  // normal part, sum of z E(z)
    ComplexMatrix q;  // t - n
    SpectralTable table;
};

Decomposition decompose(const ComplexMatrix& t, const OrderingCurve& curve);

/// Q in the ordered Schur basis: largest strictly-lower entry magnitude and
/// largest diagonal magnitude. Both small means Q is, up to that backward
/// error, upper triangular with a vanishing diagonal.
struct TriangularResidual {
    double strict_lower = 0.0;
    double diagonal = 0.0;
};
TriangularResidual nilpotent_residual(const Decomposition& d);

}  // namespace sporder
