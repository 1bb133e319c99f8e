#include "sporder/spectral.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace sporder {

std::vector<Complex> SpectralTable::members(std::size_t c) const
{
    std::vector<Complex> out;
    for (Eigen::Index i = offsets[c]; i < offsets[c + 1]; ++i)
        out.push_back(schur.triangular(i, i));
    return out;
}

SpectralTable build_spectral_table(const ComplexMatrix& t, const OrderingCurve& curve)
{
    const SpectralAnalysis a = analyze(t);
    const auto diag = a.schur.diag_order();
    const CurveValidation v = curve_validate(curve, diag, a.delta);
    if (!v.valid) {
        std::string msg = "curve " + curve.spec() + " does not separate the spectrum:";
        for (const auto& p : v.problems)
            msg += " " + p + ";";
        throw CurveSeparationError(msg);
    }

    const std::size_t k = a.clusters.size();
    std::vector<Dyadic> param(k);
    for (std::size_t c = 0; c < k; ++c)
        param[c] = curve.min_preimage(a.clusters[c].center);
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return param[x] < param[y]; });

    std::vector<int> rank(diag.size());
    for (std::size_t pos = 0; pos < k; ++pos)
        for (auto m : a.clusters[order[pos]].members)
            rank[m] = static_cast<int>(pos);

    SpectralTable tb{t, curve, a.norm, a.norm > 0.0 ? a.norm : 1.0, a.delta, reorder_by_rank(a.schur, rank),
                     {}, {}, {}, {}, {}};
    tb.offsets.push_back(0);
    const Eigen::Index n = t.rows();
    ComplexMatrix running = ComplexMatrix::Zero(n, n);
    for (std::size_t pos = 0; pos < k; ++pos) {
        const Cluster& cl = a.clusters[order[pos]];
        const Eigen::Index o = tb.offsets.back();
        const auto w = static_cast<Eigen::Index>(cl.members.size());
        tb.offsets.push_back(o + w);
        Complex sum = 0.0;
        for (Eigen::Index i = o; i < o + w; ++i)
            sum += tb.schur.triangular(i, i);
        tb.centers.push_back(sum / static_cast<double>(w));
        tb.params.push_back(param[order[pos]]);
        const auto block = tb.schur.unitary.middleCols(o, w);
        ComplexMatrix cp = block * block.adjoint();
        running += cp;
        tb.cluster_projs.push_back(std::move(cp));
        tb.flags.push_back(running);
    }
    return tb;
}

bool ParamInterval::contains(Dyadic s) const
{
    const bool above = lo_closed ? s >= lo : s > lo;
    const bool below = hi_closed ? s <= hi : s < hi;
    return above && below;
}

double pullback_mass(const SpectralTable& table, const std::vector<ParamInterval>& intervals)
{
    double mass = 0.0;
    for (std::size_t c = 0; c < table.cluster_count(); ++c)
        if (std::any_of(intervals.begin(), intervals.end(),
                        [&](const ParamInterval& iv) { return iv.contains(table.params[c]); }))
            mass += table.weight(c);
    return mass;
}

namespace {

// Number of leading clusters with parameter <= t (closed) or < t.
std::size_t count_upto(const SpectralTable& table, Dyadic t, bool closed)
{
    const auto& p = table.params;
    const auto it = closed ? std::upper_bound(p.begin(), p.end(), t) : std::lower_bound(p.begin(), p.end(), t);
    return static_cast<std::size_t>(it - p.begin());
}

Projection flag_prefix(const SpectralTable& table, std::size_t count)
{
    Projection out;
    const Eigen::Index n = table.n();
    if (count == 0) {
        out.matrix = ComplexMatrix::Zero(n, n);
        out.rank = 0;
    } else {
        out.matrix = table.flags[count - 1];
        out.rank = static_cast<int>(table.offsets[count]);
    }
    return out;
}

}  // namespace

Projection flag_projection(const SpectralTable& table, Dyadic t)
{
    return flag_prefix(table, count_upto(table, t, true));
}

Projection open_flag_projection(const SpectralTable& table, Dyadic t)
{
    return flag_prefix(table, count_upto(table, t, false));
}

Projection open_set_projection(const SpectralTable& table, const std::vector<ParamInterval>& components)
{
    std::vector<ParamInterval> sorted = components;
    for (const auto& iv : sorted) {
        if (iv.hi < iv.lo || iv.hi > Dyadic::one())
            throw std::invalid_argument("parameter interval outside [0, 1] or reversed");
        if (iv.lo_closed && iv.lo != Dyadic::zero())
            throw std::invalid_argument("only the endpoint 0 may be closed on the left");
        if (iv.hi_closed && iv.hi != Dyadic::one())
            throw std::invalid_argument("only the endpoint 1 may be closed on the right");
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const auto& a = sorted[i - 1];
        const auto& b = sorted[i];
        if (b.lo < a.hi || (b.lo == a.hi && a.hi_closed && b.lo_closed))
            throw std::invalid_argument("open set components overlap");
    }

    const Eigen::Index n = table.n();
    Projection out{ComplexMatrix::Zero(n, n), 0};
    for (const auto& iv : sorted) {
        const std::size_t upper = iv.hi_closed ? table.cluster_count() : count_upto(table, iv.hi, false);
        const std::size_t lower = iv.lo_closed ? 0 : count_upto(table, iv.lo, true);
        if (upper <= lower)
            continue;
        const Projection top = flag_prefix(table, upper);
        const Projection bottom = flag_prefix(table, lower);
        out.matrix += top.matrix - bottom.matrix;
        out.rank += top.rank - bottom.rank;
    }
    return out;
}

std::vector<std::size_t> clusters_in(const SpectralTable& table, const Region& b, BoundaryPolicy policy)
{
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < table.cluster_count(); ++c) {
        const bool in = policy == BoundaryPolicy::ByCenter ? b.contains(table.centers[c])
                                                           : region_contains_cluster(b, table.centers[c], table.members(c));
        if (in)
            out.push_back(c);
    }
    return out;
}

namespace {

// Components of the union of (s - r, s + r) intersected with [0, 1].
std::vector<ParamInterval> cover(const std::vector<Dyadic>& points, Dyadic r)
{
    std::vector<ParamInterval> raw;
    for (const Dyadic s : points) {
        ParamInterval iv;
        iv.lo = s.minus_sat(r);
        iv.lo_closed = s < r;
        iv.hi = s.plus_sat(r);
        iv.hi_closed = Dyadic::one().minus_sat(s) < r;
        raw.push_back(iv);
    }
    std::sort(raw.begin(), raw.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
    std::vector<ParamInterval> merged;
    for (const auto& iv : raw) {
        if (!merged.empty()) {
            auto& last = merged.back();
            if (iv.lo < last.hi || (iv.lo == last.hi && (last.hi_closed || iv.lo_closed))) {
                if (iv.hi > last.hi || (iv.hi == last.hi && iv.hi_closed)) {
                    last.hi = iv.hi;
                    last.hi_closed = iv.hi_closed;
                }
                continue;
            }
        }
        merged.push_back(iv);
    }
    return merged;
}

std::size_t covered_count(const SpectralTable& table, const std::vector<ParamInterval>& v)
{
    std::size_t count = 0;
    for (const Dyadic s : table.params)
        if (std::any_of(v.begin(), v.end(), [&](const ParamInterval& iv) { return iv.contains(s); }))
            ++count;
    return count;
}

}  // namespace

Projection spectral_projection(const SpectralTable& table, const Region& b, BoundaryPolicy policy)
{
    const auto inside = clusters_in(table, b, policy);
    const Eigen::Index n = table.n();
    if (inside.empty())
        return Projection{ComplexMatrix::Zero(n, n), 0};
    std::vector<Dyadic> points;
    for (auto c : inside)
        points.push_back(table.params[c]);

    // Parameters carry at most 64 bits, so level 64 always separates.
    int level = 1;
    while (covered_count(table, cover(points, Dyadic::pow2(level))) != inside.size()) {
        ++level;
        if (level > 64)
            throw std::logic_error("open cover failed to isolate the spectral parameters");
    }
    Projection stable = open_set_projection(table, cover(points, Dyadic::pow2(level)));
    for (int extra = 1; extra <= 2; ++extra) {
        const Projection next = open_set_projection(table, cover(points, Dyadic::pow2(level + extra)));
        if (next.rank != stable.rank || (next.matrix - stable.matrix).norm() > 1e-12 * static_cast<double>(n))
            throw std::logic_error("open cover projections did not stabilize");
        stable = next;
    }
    return stable;
}

Projection spectral_projection_direct(const SpectralTable& table, const Region& b, BoundaryPolicy policy)
{
    const Eigen::Index n = table.n();
    Projection out{ComplexMatrix::Zero(n, n), 0};
    for (auto c : clusters_in(table, b, policy)) {
        out.matrix += table.cluster_projs[c];
        out.rank += table.multiplicity(c);
    }
    return out;
}

std::vector<Region> dyadic_cells(double radius, int level)
{
    if (level < 0 || level > 15)
        throw std::invalid_argument("dyadic_cells: level must lie in [0, 15]");
    const std::uint64_t count = std::uint64_t{1} << (2 * level);
    std::vector<Region> out;
    out.reserve(count);
    for (std::uint64_t k = 1; k <= count; ++k)
        out.push_back(Region::cells(radius, level, {k}));
    return out;
}

namespace {

// tau(E X E) / tau(E) E for E the sum of the given cluster projections.
void add_scalar_compression(const SpectralTable& table, const ComplexMatrix& x, const std::vector<std::size_t>& group,
                            ComplexMatrix& acc)
{
    const Eigen::Index n = table.n();
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    int rank = 0;
    for (auto c : group) {
        e += table.cluster_projs[c];
        rank += table.multiplicity(c);
    }
    if (rank == 0)
        return;
    const Complex coefficient = (x * e).trace() / static_cast<double>(rank);
    acc += coefficient * e;
}

}  // namespace

ComplexMatrix dyadic_expectation(const SpectralTable& table, const ComplexMatrix& x, int level, double radius)
{
    std::map<std::uint64_t, std::vector<std::size_t>> cells;
    for (std::size_t c = 0; c < table.cluster_count(); ++c) {
        const auto k = grid_cell_index(table.centers[c], radius, level);
        if (!k)
            throw std::invalid_argument("spectral cluster outside the grid square");
        cells[*k].push_back(c);
    }
    const Eigen::Index n = table.n();
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (const auto& [k, group] : cells)
        add_scalar_compression(table, x, group, acc);
    return acc;
}

ComplexMatrix dyadic_expectation(const SpectralTable& table, int level)
{
    return dyadic_expectation(table, table.t, level, table.radius);
}

ComplexMatrix abelian_expectation(const SpectralTable& table, const ComplexMatrix& x)
{
    const Eigen::Index n = table.n();
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (std::size_t c = 0; c < table.cluster_count(); ++c)
        add_scalar_compression(table, x, {c}, acc);
    return acc;
}

ComplexMatrix abelian_expectation(const SpectralTable& table)
{
    return abelian_expectation(table, table.t);
}

ComplexMatrix block_diagonal_expectation(const ComplexMatrix& t, const std::vector<ComplexMatrix>& projections)
{
    ComplexMatrix acc = ComplexMatrix::Zero(t.rows(), t.cols());
    for (const auto& p : projections)
        acc += p * t * p;
    return acc;
}

ComplexMatrix block_diagonal_expectation(const SpectralTable& table)
{
    return block_diagonal_expectation(table.t, table.cluster_projs);
}

Decomposition decompose(const ComplexMatrix& t, const OrderingCurve& curve)
{
    Decomposition d{ComplexMatrix(), ComplexMatrix(), build_spectral_table(t, curve)};
    const SpectralTable& tb = d.table;
    ComplexVector diag(tb.n());
    for (std::size_t c = 0; c < tb.cluster_count(); ++c)
        diag.segment(tb.offsets[c], tb.multiplicity(c)).setConstant(tb.centers[c]);
    d.n = tb.schur.unitary * diag.asDiagonal() * tb.schur.unitary.adjoint();
    d.q = t - d.n;
    return d;
}

TriangularResidual nilpotent_residual(const Decomposition& d)
{
    const ComplexMatrix& u = d.table.schur.unitary;
    const ComplexMatrix m = u.adjoint() * d.q * u;
    TriangularResidual r;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        r.diagonal = std::max(r.diagonal, std::abs(m(j, j)));
        for (Eigen::Index i = j + 1; i < m.rows(); ++i)
            r.strict_lower = std::max(r.strict_lower, std::abs(m(i, j)));
    }
    return r;
}

}  // namespace sporder
