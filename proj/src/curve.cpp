#include "sporder/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sporder {

namespace {

std::uint64_t clamp_index(double scaled, std::uint64_t cells)
{
    if (!(scaled > 0.0))
        return 0;
    const double f = std::floor(scaled);
    if (f >= static_cast<double>(cells))
        return cells - 1;
    return static_cast<std::uint64_t>(f);
}

double cell_edge(double radius, std::uint64_t i, double cells)
{
    return -1.5 * radius + 3.0 * radius * static_cast<double>(i) / cells;
}

// floor index, nudged so that cell i is exactly [cell_edge(i), cell_edge(i + 1))
std::uint64_t axis_index(double x, double radius, std::uint64_t cells)
{
    const double scale = static_cast<double>(cells);
    std::uint64_t i = clamp_index((x + 1.5 * radius) / (3.0 * radius) * scale, cells);
    while (i + 1 < cells && cell_edge(radius, i + 1, scale) <= x)
        ++i;
    while (i > 0 && cell_edge(radius, i, scale) > x)
        --i;
    return i;
}

void hilbert_rotate(std::uint64_t n, std::uint64_t& x, std::uint64_t& y, std::uint64_t rx, std::uint64_t ry)
{
    if (ry == 0) {
        if (rx == 1) {
            x = n - 1 - x;
            y = n - 1 - y;
        }
        std::swap(x, y);
    }
}

}  // namespace

std::uint64_t hilbert_index(std::uint64_t x, std::uint64_t y, int order)
{
    const std::uint64_t n = std::uint64_t{1} << order;
    std::uint64_t d = 0;
    for (std::uint64_t s = n / 2; s > 0; s /= 2) {
        const std::uint64_t rx = (x & s) ? 1 : 0;
        const std::uint64_t ry = (y & s) ? 1 : 0;
        d += s * s * ((3 * rx) ^ ry);
        hilbert_rotate(n, x, y, rx, ry);
    }
    return d;
}

void hilbert_cell(std::uint64_t index, int order, std::uint64_t& x, std::uint64_t& y)
{
    const std::uint64_t n = std::uint64_t{1} << order;
    std::uint64_t t = index;
    x = y = 0;
    for (std::uint64_t s = 1; s < n; s *= 2) {
        const std::uint64_t rx = 1 & (t / 2);
        const std::uint64_t ry = 1 & (t ^ rx);
        hilbert_rotate(s, x, y, rx, ry);
        x += s * rx;
        y += s * ry;
        t /= 4;
    }
}

namespace {

std::uint64_t interleave(std::uint64_t x, std::uint64_t y, int order)
{
    std::uint64_t out = 0;
    for (int k = order - 1; k >= 0; --k) {
        out = (out << 2) | (((y >> k) & 1) << 1) | ((x >> k) & 1);
    }
    return out;
}

void deinterleave(std::uint64_t v, int order, std::uint64_t& x, std::uint64_t& y)
{
    x = y = 0;
    for (int k = 0; k < order; ++k) {
        x |= ((v >> (2 * k)) & 1) << k;
        y |= ((v >> (2 * k + 1)) & 1) << k;
    }
}

}  // namespace

OrderingCurve::OrderingCurve(CurveKind kind, double radius, int depth, bool mirrored)
    : kind_(kind), radius_(radius), depth_(depth), mirrored_(mirrored)
{
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("curve radius must be positive and finite");
    if (depth < 1 || depth > kMaxDepth)
        throw std::invalid_argument("curve depth must lie in [1, 32]");
}

std::string to_string(CurveKind kind)
{
    switch (kind) {
    case CurveKind::Hilbert: return "hilbert";
    case CurveKind::Morton: return "morton";
    case CurveKind::Lexicographic: return "lex";
    case CurveKind::Radial: return "radial";
    }
    return "?";
}

OrderingCurve OrderingCurve::parse(std::string_view spec, double radius)
{
    const auto colon = spec.find(':');
    const std::string name(spec.substr(0, colon));
    CurveKind kind;
    if (name == "hilbert")
        kind = CurveKind::Hilbert;
    else if (name == "morton")
        kind = CurveKind::Morton;
    else if (name == "lex" || name == "lexicographic")
        kind = CurveKind::Lexicographic;
    else if (name == "radial")
        kind = CurveKind::Radial;
    else
        throw std::invalid_argument("unknown curve kind: " + name);

    int depth = kMaxDepth;
    bool mirrored = false;
    if (colon != std::string_view::npos) {
        std::string rest(spec.substr(colon + 1));
        std::size_t start = 0;
        while (start <= rest.size()) {
            const auto comma = rest.find(',', start);
            const std::string opt = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            start = comma == std::string::npos ? rest.size() + 1 : comma + 1;
            if (opt == "mirror") {
                mirrored = true;
            } else if (opt.rfind("depth=", 0) == 0) {
                try {
                    std::size_t used = 0;
                    depth = std::stoi(opt.substr(6), &used);
                    if (used != opt.size() - 6)
                        throw std::invalid_argument("trailing characters");
                } catch (const std::exception&) {
                    throw std::invalid_argument("bad curve depth in: " + std::string(spec));
                }
            } else {
                throw std::invalid_argument("unknown curve option '" + opt + "' in: " + std::string(spec));
            }
        }
    }
    return OrderingCurve(kind, radius, depth, mirrored);
}

std::string OrderingCurve::spec() const
{
    return to_string(kind_) + ":depth=" + std::to_string(depth_) + (mirrored_ ? ",mirror" : "");
}

bool OrderingCurve::contains(Complex z) const
{
    const double h = 1.5 * radius_;
    return std::abs(z.real()) <= h && std::abs(z.imag()) <= h;
}

std::uint64_t OrderingCurve::cell_position(Complex z) const
{
    if (!contains(z))
        throw std::invalid_argument("point lies outside the curve square");
    if (mirrored_)
        z = Complex(-z.real(), z.imag());
    const std::uint64_t cells = std::uint64_t{1} << depth_;
    const double scale = static_cast<double>(cells);
    if (kind_ == CurveKind::Radial) {
        const std::uint64_t ring = clamp_index(std::abs(z) / (1.5 * radius_) * scale, cells);
        double angle = std::atan2(z.imag(), z.real());
        if (angle < 0.0)
            angle += 2.0 * std::numbers::pi;
        const std::uint64_t sector = clamp_index(angle / (2.0 * std::numbers::pi) * scale, cells);
        return (ring << depth_) | sector;
    }
    const std::uint64_t ix = axis_index(z.real(), radius_, cells);
    const std::uint64_t iy = axis_index(z.imag(), radius_, cells);
    switch (kind_) {
    case CurveKind::Hilbert: return hilbert_index(ix, iy, depth_);
    case CurveKind::Morton: return interleave(ix, iy, depth_);
    default: return (ix << depth_) | iy;
    }
}

Complex OrderingCurve::cell_point(std::uint64_t position) const
{
    const double cells = std::ldexp(1.0, depth_);
    std::uint64_t ix = 0, iy = 0;
    switch (kind_) {
    case CurveKind::Hilbert: hilbert_cell(position, depth_, ix, iy); break;
    case CurveKind::Morton: deinterleave(position, depth_, ix, iy); break;
    case CurveKind::Lexicographic:
        ix = position >> depth_;
        iy = position & ((std::uint64_t{1} << depth_) - 1);
        break;
    case CurveKind::Radial: {
        const std::uint64_t ring = position >> depth_;
        const std::uint64_t sector = position & ((std::uint64_t{1} << depth_) - 1);
        const double r = (static_cast<double>(ring) + 0.5) / cells * 1.5 * radius_;
        const double a = (static_cast<double>(sector) + 0.5) / cells * 2.0 * std::numbers::pi;
        return std::polar(r, a);
    }
    }
    return {cell_edge(radius_, ix, cells), cell_edge(radius_, iy, cells)};
}

Complex OrderingCurve::eval(Dyadic t) const
{
    if (t > Dyadic::one())
        throw std::invalid_argument("curve parameter outside [0, 1]");
    if (!t.fits_bits(2 * depth_))
        throw std::invalid_argument("curve parameter " + t.to_string() + " has more than " +
                                    std::to_string(2 * depth_) + " bits");
    const Dyadic::Raw total = Dyadic::Raw{1} << (2 * depth_);
    Dyadic::Raw pos = t.scaled_floor(2 * depth_);
    if (pos >= total)
        pos = total - 1;
    const Complex p = cell_point(static_cast<std::uint64_t>(pos));
    return mirrored_ ? Complex(-p.real(), p.imag()) : p;
}

Dyadic OrderingCurve::min_preimage(Complex z) const
{
    return Dyadic::from_index(cell_position(z), 2 * depth_);
}

std::weak_ordering OrderingCurve::compare(Complex a, Complex b) const
{
    return cell_position(a) <=> cell_position(b);
}

double curve_radius_for(const ComplexMatrix& t)
{
    const double r = operator_norm(t);
    return r > 0.0 ? r : 1.0;
}

CurveValidation curve_validate(const OrderingCurve& c, std::span<const Complex> spectrum, double delta)
{
    CurveValidation out;
    const auto clusters = cluster_values(spectrum, delta);
    struct Entry {
        Complex point;
        Dyadic param;
    };
    std::vector<Entry> entries;
    for (const auto& cl : clusters) {
        if (!c.contains(cl.center)) {
            out.valid = false;
            out.problems.push_back("spectral point (" + std::to_string(cl.center.real()) + ", " +
                                   std::to_string(cl.center.imag()) + ") lies outside the curve square");
            continue;
        }
        entries.push_back({cl.center, c.min_preimage(cl.center)});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.param < b.param; });
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].param == entries[i - 1].param) {
            out.valid = false;
            out.problems.push_back("clusters at (" + std::to_string(entries[i - 1].point.real()) + ", " +
                                   std::to_string(entries[i - 1].point.imag()) + ") and (" +
                                   std::to_string(entries[i].point.real()) + ", " +
                                   std::to_string(entries[i].point.imag()) +
                                   ") share a curve cell; increase the depth");
        }
    for (const auto& e : entries) {
        out.ordered_points.push_back(e.point);
        out.ordered_params.push_back(e.param);
    }
    return out;
}

}  // namespace sporder
