#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "sporder/curve.hpp"
#include "sporder/projection.hpp"
#include "sporder/report.hpp"

namespace sporder {

struct VerifyOptions {
    std::uint64_t seed = 1;

    int flag_samples = 50;   // random curve parameters per matrix and curve
    int regions = 100;       // random regions for the measure laws
    int nested_pairs = 200;  // nested region pairs for monotonicity
    int order_trials = 20;   // random interior orderings
    int split_pairs = 100;   // random invariant projections for the block split
    int shifts = 20;         // random shifts for determinant agreement
    int compress_regions = 20;
    int n_max = 10;          // grid levels for the rate and radius bounds
    int binomial_m = 20;
    int binomial_levels = 6;
    int binomial_vectors = 20;
    int hyper_samples = 10;
    int hyper_max_n = 24;    // hyperinvariance sampling only up to this size

    int density_grid = 256;
    int density_level = 3;
    double density_tol = 0.05;

    double tol_structural = 1e-9;  // projection identities, normality, invariance
    double tol_det = 1e-10;        // determinant splitting, relative
    double tol_shift_det = 1e-8;   // determinant agreement at random shifts, relative
    double tol_spectrum = 1e-8;    // eigenvalue locations, scaled by max(1, ||T||)
    double tol_backward = 1e-10;   // strictly-lower residual of a triangular form, scaled
};

/// Check ids in the order they run.
const std::vector<std::string>& check_ids();
bool is_check_id(const std::string& id);

/// FNV-1a digest of the matrix, curve spec and seed.
std::string inputs_digest(const ComplexMatrix& t, const std::string& extra, std::uint64_t seed);

/// N normal, Brown measure of N equal to that of T, Q with vanishing spectrum.
CheckReport verify_decomposition(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o);
/// E(psi([0, t])) from cover stabilization against an independently
/// reordered invariant projection.
CheckReport verify_flag_identity(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o);
/// Trace, product and additivity laws of E over random regions.
CheckReport verify_measure_laws(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o);
/// Trace, invariance and compression spectra of every flag projection.
CheckReport verify_hs_flags(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o);
/// Nested regions give nested projections; interior ordering does not matter.
CheckReport verify_hs_monotonicity(const ComplexMatrix& t, const VerifyOptions& o);
/// Flag projections are invariant under sampled commuting operators.
CheckReport verify_hyperinvariance(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o);
/// Grid expectation rate, spectral radius of T - E_n(T), and the binomial
/// bound, on the block-diagonal expectation of T (which commutes with E).
CheckReport verify_convergence(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o);
/// Determinant and measure splitting across one invariant projection.
/// Throws std::invalid_argument when p is not T-invariant.
CheckReport verify_block_split(const ComplexMatrix& t, const Projection& p, const VerifyOptions& o);
/// The block split over random invariant projections.
CheckReport verify_block_splits(const ComplexMatrix& t, const VerifyOptions& o);
/// Determinants of T and its block-diagonal expectation agree at random
/// shifts; compressions of the expectation have spectrum in the region.
CheckReport verify_block_expectation(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o);
/// Density grid cell masses against counting masses.
CheckReport verify_brown_density(const ComplexMatrix& t, const VerifyOptions& o);
/// [[1,1],[0,2]] under lex and mirrored lex.
CheckReport verify_ordering_witness(const VerifyOptions& o);

/// Runs the selected checks (all per-matrix checks when `only` is empty;
/// brown-density and ordering-witness run only when named). Per-curve checks
/// run once for every curve spec. A curve that fails to separate the
/// spectrum turns its checks into skips. Reports come back sorted.
std::vector<CheckReport> run_checks(const ComplexMatrix& t, const std::string& subject,
                                    const std::vector<std::string>& curve_specs, const VerifyOptions& o,
                                    const std::set<std::string>& only = {});

}  // namespace sporder
