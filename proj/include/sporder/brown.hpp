#pragma once

#include <string>
#include <vector>

#include "sporder/matrix.hpp"
#include "sporder/region.hpp"

namespace sporder {

struct Atom {
    Complex location;
    double weight;
};

/// Finite atomic probability measure on the plane.
class PointMeasure {
public:
    PointMeasure() = default;
    explicit PointMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    double total_weight() const;

    /// Same atoms moved by `offset`.
    PointMeasure shifted(Complex offset) const;

    /// "re,im,weight" rows, 17 significant digits, with a header line.
    std::string to_csv() const;

private:
    std::vector<Atom> atoms_;
};

/// Clustered counting measure: one atom per cluster, weight multiplicity/n.
PointMeasure counting_measure(std::span<const Complex> eigenvalues, double delta);

/// The Brown measure of a matrix: eigenvalue clusters at the clustering
/// threshold of ||T||, weight multiplicity/n.
PointMeasure empirical_brown(const ComplexMatrix& t);

/// (1/2) tau log((T - lambda)*(T - lambda) + eps^2). With eps == 0 this is
/// log of the Fuglede-Kadison determinant of T - lambda, and -infinity when
/// T - lambda is singular.
double log_potential(const ComplexMatrix& t, Complex lambda, double eps);

/// Cell masses of the Brown density: (1/2pi) times the 5-point Laplacian of
/// the regularized log-potential, sampled at cell centers of a g x g grid
/// on the square of side 3R centered at 0 (R = ||T||, or 1 for T = 0).
/// Row 0 is the top row, column 0 the leftmost.
struct DensityGrid {
    double radius = 0.0;
    int resolution = 0;
    double eps = 0.0;
    std::vector<double> raw;   // row-major, before clamping
    std::vector<double> mass;  // raw clamped at 0

    double side() const { return 3.0 * radius; }
    double raw_total() const;
    double clamped_total() const;
    double min_raw() const;
    Complex cell_center(int row, int col) const;
    /// Sums clamped masses into the 4^level grid cells (k = row * 2^level + col + 1
    /// maps to index k - 1). Requires resolution divisible by 2^level.
    std::vector<double> aggregate(int level) const;

    /// g rows of comma-separated clamped masses.
    std::string to_csv() const;
    /// 8-bit binary PGM heatmap, max-normalized.
    std::string to_pgm() const;
};

/// eps default 1e-3 * max(1, ||T||); g >= 16. Grid points are evaluated in
/// parallel over `threads` workers (0 = hardware concurrency); the result
/// does not depend on the schedule.
DensityGrid brown_density_grid(const ComplexMatrix& t, int g, double eps, unsigned threads = 0);

/// Sum of weights of atoms inside b.
double region_mass(const PointMeasure& m, const Region& b);

/// Bottleneck distance between atoms of equal weight; +infinity when the
/// weight profiles differ.
double measure_distance(const PointMeasure& a, const PointMeasure& b);

}  // namespace sporder
