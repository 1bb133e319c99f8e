#include "sporder/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace sporder {

void require_valid(const ComplexMatrix& m)
{
    if (m.rows() < 1 || m.rows() != m.cols())
        throw std::invalid_argument("matrix must be square with dimension >= 1, got " +
                                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if (!m.allFinite())
        throw std::invalid_argument("matrix has non-finite entries");
}

Complex normalized_trace(const ComplexMatrix& a)
{
    return a.trace() / static_cast<double>(a.rows());
}

double operator_norm(const ComplexMatrix& a)
{
    if (a.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    return svd.singularValues()(0);
}

double clustering_threshold(double norm)
{
    return 1e-8 * std::max(1.0, norm);
}

double log_fk_determinant(const ComplexMatrix& t)
{
    if (t.rows() == 0)
        return 0.0;
    Eigen::PartialPivLU<ComplexMatrix> lu(t);
    const auto& u = lu.matrixLU();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        const double a = std::abs(u(i, i));
        if (a == 0.0)
            return -std::numeric_limits<double>::infinity();
        acc += std::log(a);
    }
    return acc / static_cast<double>(t.rows());
}

double fk_determinant(const ComplexMatrix& t)
{
    const double l = log_fk_determinant(t);
    return std::isinf(l) ? 0.0 : std::exp(l);
}

std::vector<double> power_growth(const ComplexMatrix& t, int m_max)
{
    if (m_max < 1)
        throw std::invalid_argument("power_growth: m_max must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(m_max), 0.0);
    const double scale = operator_norm(t);
    if (scale == 0.0)
        return out;

    const ComplexMatrix a = t / scale;
    ComplexMatrix p = a;
    double log_mass = 0.0;  // log of the factor divided out of p so far
    for (int m = 1; m <= m_max; ++m) {
        if (m > 1)
            p = a * p;
        const double f = p.norm();
        if (f == 0.0)
            break;  // exact nilpotency: remaining entries stay 0
        p /= f;
        log_mass += std::log(f);
        const double op = operator_norm(p);
        out[static_cast<std::size_t>(m - 1)] = scale * std::exp((log_mass + std::log(op)) / m);
    }
    return out;
}

std::vector<Complex> SchurForm::diag_order() const
{
    std::vector<Complex> d(size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = triangular(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    return d;
}

SchurForm schur_form(const ComplexMatrix& t)
{
    require_valid(t);
    const Eigen::Index n = t.rows();
    Eigen::ComplexSchur<ComplexMatrix> cs(n);
    cs.setMaxIterations(100 * n);
    cs.compute(t, true);
    if (cs.info() != Eigen::Success)
        throw ConvergenceError("Schur iteration did not converge within " +
                               std::to_string(100 * n) + " sweeps (n = " + std::to_string(n) + ")");
    SchurForm s{cs.matrixU(), cs.matrixT()};
    s.triangular.triangularView<Eigen::StrictlyLower>().setZero();
    return s;
}

namespace {

// Plane rotation [c s; -conj(s) c] with c real that annihilates g against f.
struct Rotation {
    double c;
    Complex s;
};

Rotation make_rotation(Complex f, Complex g)
{
    const double af = std::abs(f);
    const double ag = std::abs(g);
    if (ag == 0.0)
        return {1.0, 0.0};
    if (af == 0.0)
        return {0.0, std::conj(g) / ag};
    const double norm = std::hypot(af, ag);
    return {af / norm, (f / af) * std::conj(g) / norm};
}

// Exchanges the diagonal entries at k and k+1 of the triangular factor,
// keeping U R U* fixed.
void swap_adjacent(ComplexMatrix& r, ComplexMatrix& q, Eigen::Index k)
{
    const Eigen::Index n = r.rows();
    const Complex t11 = r(k, k);
    const Complex t22 = r(k + 1, k + 1);
    const auto [c, s] = make_rotation(r(k, k + 1), t22 - t11);

    for (Eigen::Index j = k + 2; j < n; ++j) {
        const Complex x = r(k, j);
        const Complex y = r(k + 1, j);
        r(k, j) = c * x + s * y;
        r(k + 1, j) = c * y - std::conj(s) * x;
    }
    for (Eigen::Index i = 0; i < k; ++i) {
        const Complex x = r(i, k);
        const Complex y = r(i, k + 1);
        r(i, k) = c * x + std::conj(s) * y;
        r(i, k + 1) = c * y - s * x;
    }
    r(k, k) = t22;
    r(k + 1, k + 1) = t11;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex x = q(i, k);
        const Complex y = q(i, k + 1);
        q(i, k) = c * x + std::conj(s) * y;
        q(i, k + 1) = c * y - s * x;
    }
}

}  // namespace

SchurForm reorder_schur(const SchurForm& s, const ComplexCompare& cmp, double delta,
                        std::vector<SkippedSwap>* skipped)
{
    SchurForm out = s;
    auto& r = out.triangular;
    const Eigen::Index n = r.rows();
    // insertion sort by adjacent swaps
    for (Eigen::Index i = 1; i < n; ++i) {
        for (Eigen::Index j = i; j > 0; --j) {
            const Complex lo = r(j, j);
            const Complex hi = r(j - 1, j - 1);
            if (cmp(lo, hi) != std::weak_ordering::less)
                break;
            if (std::abs(lo - hi) <= delta) {
                if (skipped)
                    skipped->push_back({static_cast<std::size_t>(j - 1), hi, lo});
                break;
            }
            swap_adjacent(r, out.unitary, j - 1);
        }
    }
    return out;
}

SchurForm reorder_by_rank(const SchurForm& s, std::vector<int> rank)
{
    if (rank.size() != s.size())
        throw std::invalid_argument("reorder_by_rank: rank list has wrong length");
    SchurForm out = s;
    const auto n = static_cast<Eigen::Index>(rank.size());
    for (Eigen::Index i = 1; i < n; ++i) {
        for (Eigen::Index j = i; j > 0 && rank[j] < rank[j - 1]; --j) {
            swap_adjacent(out.triangular, out.unitary, j - 1);
            std::swap(rank[j], rank[j - 1]);
        }
    }
    return out;
}

std::vector<Cluster> cluster_values(std::span<const Complex> values, double delta)
{
    const std::size_t n = values.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(values[i] - values[j]) <= delta) {
                const std::size_t a = find(i), b = find(j);
                if (a != b)
                    parent[std::max(a, b)] = std::min(a, b);
            }

    std::vector<Cluster> out;
    std::vector<std::ptrdiff_t> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<std::ptrdiff_t>(out.size());
            out.push_back({});
        }
        out[static_cast<std::size_t>(slot[root])].members.push_back(i);
    }
    for (auto& c : out) {
        Complex sum = 0.0;
        for (auto m : c.members)
            sum += values[m];
        c.center = sum / static_cast<double>(c.members.size());
    }
    return out;
}

namespace {

bool has_perfect_matching(const std::vector<std::vector<double>>& dist, double threshold)
{
    const std::size_t n = dist.size();
    std::vector<std::ptrdiff_t> match_right(n, -1);
    std::vector<char> seen;
    std::function<bool(std::size_t)> augment = [&](std::size_t u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (dist[u][v] > threshold || seen[v])
                continue;
            seen[v] = 1;
            if (match_right[v] < 0 || augment(static_cast<std::size_t>(match_right[v]))) {
                match_right[v] = static_cast<std::ptrdiff_t>(u);
                return true;
            }
        }
        return false;
    };
    for (std::size_t u = 0; u < n; ++u) {
        seen.assign(n, 0);
        if (!augment(u))
            return false;
    }
    return true;
}

}  // namespace

double multiset_distance(std::span<const Complex> a, std::span<const Complex> b)
{
    if (a.size() != b.size())
        return std::numeric_limits<double>::infinity();
    const std::size_t n = a.size();
    if (n == 0)
        return 0.0;
    std::vector<std::vector<double>> dist(n, std::vector<double>(n));
    std::vector<double> all;
    all.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            dist[i][j] = std::abs(a[i] - b[j]);
            all.push_back(dist[i][j]);
        }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    std::size_t lo = 0, hi = all.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (has_perfect_matching(dist, all[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return all[lo];
}

double projection_defect(const ComplexMatrix& p)
{
    const double idem = (p * p - p).norm();
    const double herm = (p.adjoint() - p).norm();
    return std::max(idem, herm);
}

}  // namespace sporder
