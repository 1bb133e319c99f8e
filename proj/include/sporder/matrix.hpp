#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sporder {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Raised when the Schur iteration exceeds its sweep cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument unless `m` is square, non-empty and finite.
void require_valid(const ComplexMatrix& m);

/// tr(A)/n, the tracial state of M_n.
Complex normalized_trace(const ComplexMatrix& a);

/// Largest singular value.
double operator_norm(const ComplexMatrix& a);

/// Eigenvalues closer than this are one spectral point: 1e-8 * max(1, norm).
double clustering_threshold(double norm);

/// |det T|^{1/n}. Zero for a singular matrix.
double fk_determinant(const ComplexMatrix& t);

/// log of fk_determinant; -infinity for a singular matrix.
double log_fk_determinant(const ComplexMatrix& t);

/// Entry m-1 holds ||T^m||^{1/m} for m = 1..m_max. Powers are formed on a
/// running normalization so that neither overflow nor underflow occurs.
std::vector<double> power_growth(const ComplexMatrix& t, int m_max);

/// T = U R U*, R upper triangular.
struct SchurForm {
    ComplexMatrix unitary;
    ComplexMatrix triangular;

    std::size_t size() const { return static_cast<std::size_t>(triangular.rows()); }
    std::vector<Complex> diag_order() const;
    ComplexMatrix reconstruct() const { return unitary * triangular * unitary.adjoint(); }
};

/// Complex Schur form. The QR sweep count is capped at 100 n; exceeding the
/// cap raises ConvergenceError.
SchurForm schur_form(const ComplexMatrix& t);

/// Swap of diagonal positions (pos, pos+1) that was refused because the two
/// eigenvalues are within the clustering threshold.
struct SkippedSwap {
    std::size_t pos;
    Complex upper;
    Complex lower;
};

using ComplexCompare = std::function<std::weak_ordering(Complex, Complex)>;

/// Sorts the diagonal nondecreasing under `cmp` by adjacent unitary swaps.
/// Swaps between eigenvalues within `delta` of each other are skipped and
/// appended to `skipped` when given.
SchurForm reorder_schur(const SchurForm& s, const ComplexCompare& cmp, double delta,
                        std::vector<SkippedSwap>* skipped = nullptr);

/// Stable reorder so that diagonal position i ends up sorted by rank[i].
/// Positions of equal rank keep their relative order and are never swapped.
SchurForm reorder_by_rank(const SchurForm& s, std::vector<int> rank);

/// Single-linkage grouping of eigenvalues at distance <= delta.
struct Cluster {
    Complex center;                   // mean of the members
    std::vector<std::size_t> members; // indices into the input list, ascending
};

/// Clusters ordered by their smallest member index.
std::vector<Cluster> cluster_values(std::span<const Complex> values, double delta);

/// Bottleneck matching distance between two equally sized multisets;
/// +infinity when the sizes differ.
double multiset_distance(std::span<const Complex> a, std::span<const Complex> b);

/// Residual ||P^2 - P||_F and ||P* - P||_F, the larger of the two.
double projection_defect(const ComplexMatrix& p);

}  // namespace sporder
