#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sporder/dyadic.hpp"
#include "sporder/matrix.hpp"

namespace sporder {

enum class CurveKind { Hilbert, Morton, Lexicographic, Radial };

/// A space-filling ordering of the square [-3R/2, 3R/2]^2, resolved to
/// 2^depth x 2^depth cells. Parameters are exact dyadics in [0, 1]; the
/// minimal preimage of a point is the first parameter of its cell.
///
/// Conventions:
///  - Hilbert starts at the bottom-left corner and ends at the bottom-right.
///  - Morton interleaves coordinates with y-bits at odd fractional positions.
///  - Lexicographic sweeps columns left to right, each column bottom to top.
///  - Radial sweeps rings |z| (normalized by 3R/2, corners folded into the
///    outer ring) and, within a ring, the angle arg z in [0, 2pi).
/// Square cells are [x0, x1) x [y0, y1), with points on the outer right or top
/// edge folded into the last cell; eval returns the bottom-left cell corner
/// (the polar cell center for Radial), so min_preimage(eval(t)) == t.
/// A mirrored curve is the same ordering composed with the reflection
/// x -> -x of the square.
class OrderingCurve {
public:
    static constexpr int kMaxDepth = 32;

    OrderingCurve(CurveKind kind, double radius, int depth = kMaxDepth, bool mirrored = false);

    /// "hilbert:depth=32", "morton:depth=32", "lex", "radial", with optional
    /// comma-separated options "depth=<bits>" (default 32) and "mirror".
    static OrderingCurve parse(std::string_view spec, double radius);
    /// Canonical spec string, parseable by parse().
    std::string spec() const;

    CurveKind kind() const { return kind_; }
    double radius() const { return radius_; }
    int depth() const { return depth_; }
    bool mirrored() const { return mirrored_; }
    double side() const { return 3.0 * radius_; }

    bool contains(Complex z) const;

    /// Throws std::invalid_argument for t outside [0, 1] or with more than
    /// 2*depth fractional bits.
    Complex eval(Dyadic t) const;
    /// Throws std::invalid_argument for z outside the square.
    Dyadic min_preimage(Complex z) const;
    /// Position of the cell of z along the curve, in [0, 4^depth).
    std::uint64_t cell_position(Complex z) const;
    /// Equal only when both points share a depth-level cell.
    std::weak_ordering compare(Complex a, Complex b) const;

private:
    Complex cell_point(std::uint64_t position) const;

    CurveKind kind_;
    double radius_;
    int depth_;
    bool mirrored_;
};

std::string to_string(CurveKind kind);

/// Radius used to place the curve square around a matrix: ||T||, or 1 for T = 0.
double curve_radius_for(const ComplexMatrix& t);

struct CurveValidation {
    bool valid = true;
    std::vector<std::string> problems;
    /// Spectral clusters sorted along the curve with their minimal preimages.
    std::vector<Complex> ordered_points;
    std::vector<Dyadic> ordered_params;
};

/// Clusters the spectrum at `delta`, locates every cluster, and requires the
/// minimal preimages to be pairwise distinct.
CurveValidation curve_validate(const OrderingCurve& c, std::span<const Complex> spectrum, double delta);

/// Hilbert index of cell (x, y) on a 2^order grid, and its inverse.
std::uint64_t hilbert_index(std::uint64_t x, std::uint64_t y, int order);
void hilbert_cell(std::uint64_t index, int order, std::uint64_t& x, std::uint64_t& y);

}  // namespace sporder
