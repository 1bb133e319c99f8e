#include "sporder/region.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <variant>

#include "sporder/matrix_io.hpp"

namespace sporder {

std::optional<std::uint64_t> grid_cell_index(Complex z, double radius, int level)
{
    const double h = 1.5 * radius;
    if (!(std::abs(z.real()) <= h && std::abs(z.imag()) <= h))
        return std::nullopt;
    const std::uint64_t cells = std::uint64_t{1} << level;
    const double scale = static_cast<double>(cells);
    const auto to_index = [&](double u) {
        const double f = std::floor(u * scale);
        if (f < 0.0)
            return std::uint64_t{0};
        if (f >= scale)
            return cells - 1;
        return static_cast<std::uint64_t>(f);
    };
    const std::uint64_t col = to_index((z.real() + h) / (2.0 * h));
    const std::uint64_t row = to_index((h - z.imag()) / (2.0 * h));
    return row * cells + col + 1;
}

struct Region::Node {
    struct All {};
    struct None {};
    struct Disk {
        Complex center;
        double r;
    };
    struct HalfPlane {
        double a, b, c;
    };
    struct Cells {
        double radius;
        int level;
        std::vector<std::uint64_t> ks;  // sorted
    };
    struct Prefix {
        OrderingCurve curve;
        Dyadic t;
        bool closed;
    };
    struct And {
        Region l, r;
    };
    struct Or {
        Region l, r;
    };
    struct Not {
        Region x;
    };
    std::variant<All, None, Disk, HalfPlane, Cells, Prefix, And, Or, Not> v;
};

Region Region::all() { return Region(std::make_shared<Node>(Node{Node::All{}})); }
Region Region::none() { return Region(std::make_shared<Node>(Node{Node::None{}})); }

Region Region::disk(Complex center, double r)
{
    if (!(r >= 0.0))
        throw std::invalid_argument("disk radius must be >= 0");
    return Region(std::make_shared<Node>(Node{Node::Disk{center, r}}));
}

Region Region::halfplane(double a, double b, double c)
{
    if (a == 0.0 && b == 0.0)
        throw std::invalid_argument("halfplane needs (a, b) != 0");
    return Region(std::make_shared<Node>(Node{Node::HalfPlane{a, b, c}}));
}

Region Region::cells(double radius, int level, std::vector<std::uint64_t> ks)
{
    if (level < 0 || level > 30)
        throw std::invalid_argument("cell level must lie in [0, 30]");
    const std::uint64_t count = std::uint64_t{1} << (2 * level);
    for (auto k : ks)
        if (k < 1 || k > count)
            throw std::invalid_argument("cell index " + std::to_string(k) + " out of range at level " +
                                        std::to_string(level));
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return Region(std::make_shared<Node>(Node{Node::Cells{radius, level, std::move(ks)}}));
}

Region Region::curve_prefix(const OrderingCurve& curve, Dyadic t, bool closed)
{
    return Region(std::make_shared<Node>(Node{Node::Prefix{curve, t, closed}}));
}

Region Region::operator&(const Region& o) const { return Region(std::make_shared<Node>(Node{Node::And{*this, o}})); }
Region Region::operator|(const Region& o) const { return Region(std::make_shared<Node>(Node{Node::Or{*this, o}})); }
Region Region::operator!() const { return Region(std::make_shared<Node>(Node{Node::Not{*this}})); }

bool Region::contains(Complex z) const
{
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Node::All>)
                return true;
            else if constexpr (std::is_same_v<T, Node::None>)
                return false;
            else if constexpr (std::is_same_v<T, Node::Disk>)
                return std::abs(z - n.center) <= n.r;
            else if constexpr (std::is_same_v<T, Node::HalfPlane>)
                return n.a * z.real() + n.b * z.imag() <= n.c;
            else if constexpr (std::is_same_v<T, Node::Cells>) {
                const auto k = grid_cell_index(z, n.radius, n.level);
                return k && std::binary_search(n.ks.begin(), n.ks.end(), *k);
            } else if constexpr (std::is_same_v<T, Node::Prefix>) {
                if (!n.curve.contains(z))
                    return false;
                const Dyadic s = n.curve.min_preimage(z);
                return n.closed ? s <= n.t : s < n.t;
            } else if constexpr (std::is_same_v<T, Node::And>)
                return n.l.contains(z) && n.r.contains(z);
            else if constexpr (std::is_same_v<T, Node::Or>)
                return n.l.contains(z) || n.r.contains(z);
            else
                return !n.x.contains(z);
        },
        node_->v);
}

std::string Region::describe() const
{
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Node::All>)
                return "all";
            else if constexpr (std::is_same_v<T, Node::None>)
                return "none";
            else if constexpr (std::is_same_v<T, Node::Disk>)
                return "disk:" + format_double(n.center.real()) + "," + format_double(n.center.imag()) + "," +
                       format_double(n.r);
            else if constexpr (std::is_same_v<T, Node::HalfPlane>)
                return "halfplane:" + format_double(n.a) + "," + format_double(n.b) + "," + format_double(n.c);
            else if constexpr (std::is_same_v<T, Node::Cells>) {
                std::string s = "cells:n=" + std::to_string(n.level) + ",k=";
                for (std::size_t i = 0; i < n.ks.size(); ++i)
                    s += (i ? "," : "") + std::to_string(n.ks[i]);
                return s;
            } else if constexpr (std::is_same_v<T, Node::Prefix>)
                return "prefix[" + n.curve.spec() + (n.closed ? ",closed," : ",open,") + n.t.to_string() + "]";
            else if constexpr (std::is_same_v<T, Node::And>)
                return "(" + n.l.describe() + "&" + n.r.describe() + ")";
            else if constexpr (std::is_same_v<T, Node::Or>)
                return "(" + n.l.describe() + "|" + n.r.describe() + ")";
            else
                return "!" + n.x.describe();
        },
        node_->v);
}

std::vector<std::uint64_t> Region::rasterize(double radius, int level) const
{
    std::vector<std::uint64_t> out;
    const std::uint64_t cells = std::uint64_t{1} << level;
    const double h = 3.0 * radius / static_cast<double>(cells);
    for (std::uint64_t row = 0; row < cells; ++row)
        for (std::uint64_t col = 0; col < cells; ++col) {
            const Complex c(-1.5 * radius + (static_cast<double>(col) + 0.5) * h,
                            1.5 * radius - (static_cast<double>(row) + 0.5) * h);
            if (contains(c))
                out.push_back(row * cells + col + 1);
        }
    return out;
}

namespace {

class Parser {
public:
    Parser(std::string_view s, double radius) : s_(s), radius_(radius) {}

    Region run()
    {
        Region r = expr();
        skip_ws();
        if (pos_ != s_.size())
            fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw std::invalid_argument("region spec \"" + std::string(s_) + "\": " + why);
    }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool eat(char c)
    {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Region expr()
    {
        Region r = term();
        while (eat('|'))
            r = r | term();
        return r;
    }

    Region term()
    {
        Region r = factor();
        while (eat('&'))
            r = r & factor();
        return r;
    }

    Region factor()
    {
        if (eat('!'))
            return !factor();
        if (eat('(')) {
            Region r = expr();
            if (!eat(')'))
                fail("missing ')'");
            return r;
        }
        return atom();
    }

    static std::vector<std::string> split(const std::string& s)
    {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(c))) {
                cur += c;
            }
        }
        out.push_back(cur);
        return out;
    }

    double number(const std::string& t) const
    {
        try {
            std::size_t used = 0;
            const double v = std::stod(t, &used);
            if (used != t.size() || !std::isfinite(v))
                throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            fail("bad number '" + t + "'");
        }
    }

    std::uint64_t integer(const std::string& t) const
    {
        if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            fail("bad integer '" + t + "'");
        return std::stoull(t);
    }

    Region atom()
    {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::string_view("&|!()").find(s_[pos_]) == std::string_view::npos)
            ++pos_;
        std::string text(s_.substr(start, pos_ - start));
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
            text.pop_back();
        if (text.empty())
            fail("expected a region");
        if (text == "all")
            return Region::all();
        if (text == "none")
            return Region::none();
        const auto colon = text.find(':');
        if (colon == std::string::npos)
            fail("unknown region '" + text + "'");
        const std::string name = text.substr(0, colon);
        const auto args = split(text.substr(colon + 1));
        if (name == "disk") {
            if (args.size() != 3)
                fail("disk needs cx,cy,r");
            return Region::disk({number(args[0]), number(args[1])}, number(args[2]));
        }
        if (name == "halfplane") {
            if (args.size() != 3)
                fail("halfplane needs a,b,c");
            return Region::halfplane(number(args[0]), number(args[1]), number(args[2]));
        }
        if (name == "cells") {
            int level = -1;
            std::vector<std::uint64_t> ks;
            bool in_k = false;
            for (const auto& a : args) {
                if (a.rfind("n=", 0) == 0) {
                    level = static_cast<int>(integer(a.substr(2)));
                    in_k = false;
                } else if (a.rfind("k=", 0) == 0) {
                    ks.push_back(integer(a.substr(2)));
                    in_k = true;
                } else if (in_k) {
                    ks.push_back(integer(a));
                } else {
                    fail("cells expects n=<level>,k=<k1>,<k2>,...");
                }
            }
            if (level < 0)
                fail("cells needs n=<level>");
            return Region::cells(radius_, level, std::move(ks));
        }
        fail("unknown region kind '" + name + "'");
    }

    std::string_view s_;
    double radius_;
    std::size_t pos_ = 0;
};

}  // namespace

Region Region::parse(std::string_view spec, double radius)
{
    return Parser(spec, radius).run();
}

bool region_contains_cluster(const Region& b, Complex center, std::span<const Complex> members)
{
    const bool in = b.contains(center);
    for (const Complex& m : members)
        if (b.contains(m) != in)
            throw RegionAmbiguity("spectral cluster at (" + format_double(center.real()) + ", " +
                                      format_double(center.imag()) + ") straddles the region boundary",
                                  m);
    return in;
}

}  // namespace sporder
