#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sporder/curve.hpp"
#include "sporder/matrix.hpp"

namespace sporder {

/// A spectral cluster whose members fall on both sides of a region boundary.
class RegionAmbiguity : public std::runtime_error {
public:
    RegionAmbiguity(const std::string& what, Complex point) : std::runtime_error(what), point_(point) {}
    Complex point() const { return point_; }

private:
    Complex point_;
};

/// 1-based index k of the grid cell holding z when the square of side 3R
/// centered at 0 is cut into 2^level x 2^level cells, k increasing to the
/// right then down. Each cell owns its top and left edges (so the top-left
/// corner, but neither the bottom-left nor the top-right corner). Points on
/// the outer right or bottom edge fold into the adjacent cell. nullopt
/// outside the square.
std::optional<std::uint64_t> grid_cell_index(Complex z, double radius, int level);

/// Immutable Borel-set description with decidable membership.
class Region {
public:
    struct Node;

    static Region all();
    static Region none();
    /// Closed disk |z - center| <= r.
    static Region disk(Complex center, double r);
    /// a x + b y <= c.
    static Region halfplane(double a, double b, double c);
    /// Union of grid cells (1-based k) at `level` on the square of side 3R.
    static Region cells(double radius, int level, std::vector<std::uint64_t> ks);
    /// psi([0, t]) (closed) or psi([0, t)) (open) for an ordering curve.
    static Region curve_prefix(const OrderingCurve& curve, Dyadic t, bool closed = true);

    Region operator&(const Region& o) const;
    Region operator|(const Region& o) const;
    Region operator!() const;

    bool contains(Complex z) const;

    /// Parses "disk:cx,cy,r", "halfplane:a,b,c", "cells:n=3,k=1,5,9", "all",
    /// "none", combined with "&", "|", "!" and parentheses ("!" binds
    /// tightest, then "&", then "|"). Cell regions use `radius` for the square.
    static Region parse(std::string_view spec, double radius);

    /// Text form; parseable again for everything except curve prefixes.
    std::string describe() const;

    /// Cells at `level` whose center lies in the region.
    std::vector<std::uint64_t> rasterize(double radius, int level) const;

private:
    explicit Region(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Membership of a cluster, decided by its center. Throws RegionAmbiguity when
/// the members disagree with each other.
bool region_contains_cluster(const Region& b, Complex center, std::span<const Complex> members);

}  // namespace sporder
