#include "sporder/brown.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

#include <Eigen/Cholesky>

#include "sporder/matrix_io.hpp"

namespace sporder {

double PointMeasure::total_weight() const
{
    double s = 0.0;
    for (const auto& a : atoms_)
        s += a.weight;
    return s;
}

PointMeasure PointMeasure::shifted(Complex offset) const
{
    std::vector<Atom> out = atoms_;
    for (auto& a : out)
        a.location += offset;
    return PointMeasure(std::move(out));
}

std::string PointMeasure::to_csv() const
{
    std::string s = "re,im,weight\n";
    for (const auto& a : atoms_)
        s += format_double(a.location.real()) + "," + format_double(a.location.imag()) + "," +
             format_double(a.weight) + "\n";
    return s;
}

PointMeasure counting_measure(std::span<const Complex> eigenvalues, double delta)
{
    const auto clusters = cluster_values(eigenvalues, delta);
    std::vector<Atom> atoms;
    atoms.reserve(clusters.size());
    const double n = static_cast<double>(eigenvalues.size());
    for (const auto& c : clusters)
        atoms.push_back({c.center, static_cast<double>(c.members.size()) / n});
    return PointMeasure(std::move(atoms));
}

PointMeasure empirical_brown(const ComplexMatrix& t)
{
    const SchurForm s = schur_form(t);
    const auto diag = s.diag_order();
    return counting_measure(diag, clustering_threshold(operator_norm(t)));
}

double log_potential(const ComplexMatrix& t, Complex lambda, double eps)
{
    require_valid(t);
    if (!(eps >= 0.0))
        throw std::invalid_argument("log_potential: eps must be >= 0");
    const Eigen::Index n = t.rows();
    ComplexMatrix x = t - lambda * ComplexMatrix::Identity(n, n);
    if (eps == 0.0)
        return log_fk_determinant(x);
    ComplexMatrix m = x.adjoint() * x;
    m.diagonal().array() += eps * eps;
    Eigen::LLT<ComplexMatrix> llt(m);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        acc += std::log(llt.matrixLLT()(i, i).real());
    return acc / static_cast<double>(n);
}

double DensityGrid::raw_total() const
{
    double s = 0.0;
    for (double v : raw)
        s += v;
    return s;
}

double DensityGrid::clamped_total() const
{
    double s = 0.0;
    for (double v : mass)
        s += v;
    return s;
}

double DensityGrid::min_raw() const
{
    return raw.empty() ? 0.0 : *std::min_element(raw.begin(), raw.end());
}

Complex DensityGrid::cell_center(int row, int col) const
{
    const double h = side() / resolution;
    return {-1.5 * radius + (col + 0.5) * h, 1.5 * radius - (row + 0.5) * h};
}

std::vector<double> DensityGrid::aggregate(int level) const
{
    const int cells = 1 << level;
    if (resolution % cells != 0)
        throw std::invalid_argument("grid resolution is not divisible by 2^level");
    const int block = resolution / cells;
    std::vector<double> out(static_cast<std::size_t>(cells) * cells, 0.0);
    for (int r = 0; r < resolution; ++r)
        for (int c = 0; c < resolution; ++c)
            out[static_cast<std::size_t>((r / block) * cells + c / block)] +=
                mass[static_cast<std::size_t>(r) * resolution + c];
    return out;
}

std::string DensityGrid::to_csv() const
{
    std::string s;
    for (int r = 0; r < resolution; ++r) {
        for (int c = 0; c < resolution; ++c) {
            if (c)
                s += ',';
            s += format_double(mass[static_cast<std::size_t>(r) * resolution + c]);
        }
        s += '\n';
    }
    return s;
}

std::string DensityGrid::to_pgm() const
{
    std::string s = "P5\n" + std::to_string(resolution) + " " + std::to_string(resolution) + "\n255\n";
    const double top = mass.empty() ? 0.0 : *std::max_element(mass.begin(), mass.end());
    for (double v : mass) {
        const double scaled = top > 0.0 ? std::round(255.0 * v / top) : 0.0;
        s += static_cast<char>(static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0)));
    }
    return s;
}

namespace {

// (1/2) tau log(|R - lambda|^2 + eps^2) for upper triangular R; unitarily
// equivalent to the potential of T.
class TriangularPotential {
public:
    TriangularPotential(const ComplexMatrix& r, double eps)
        : r_(r), eps2_(eps * eps), x_(r.rows(), r.rows()), m_(r.rows(), r.rows()), llt_(r.rows())
    {
    }

    double operator()(Complex lambda)
    {
        const Eigen::Index n = r_.rows();
        x_ = r_;
        x_.diagonal().array() -= lambda;
        m_.noalias() = x_.adjoint() * x_.triangularView<Eigen::Upper>();
        m_.diagonal().array() += eps2_;
        llt_.compute(m_);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            acc += std::log(llt_.matrixLLT()(i, i).real());
        return acc / static_cast<double>(n);
    }

private:
    const ComplexMatrix& r_;
    double eps2_;
    ComplexMatrix x_, m_;
    Eigen::LLT<ComplexMatrix> llt_;
};

}  // namespace

DensityGrid brown_density_grid(const ComplexMatrix& t, int g, double eps, unsigned threads)
{
    require_valid(t);
    if (!(eps > 0.0))
        throw std::invalid_argument("brown_density_grid: eps must be > 0");
    if (g < 16)
        throw std::invalid_argument("brown_density_grid: resolution must be >= 16");

    DensityGrid grid;
    const double norm = operator_norm(t);
    grid.radius = norm > 0.0 ? norm : 1.0;
    grid.resolution = g;
    grid.eps = eps;

    const SchurForm schur = schur_form(t);
    const double h = grid.side() / g;
    const int w = g + 2;  // one halo node on each side
    std::vector<double> phi(static_cast<std::size_t>(w) * w);

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(w));
    auto work = [&](unsigned id) {
        TriangularPotential pot(schur.triangular, eps);
        for (int i = static_cast<int>(id); i < w; i += static_cast<int>(threads))
            for (int j = 0; j < w; ++j) {
                const Complex lambda(-1.5 * grid.radius + (j - 0.5) * h, 1.5 * grid.radius - (i - 0.5) * h);
                phi[static_cast<std::size_t>(i) * w + j] = pot(lambda);
            }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < threads; ++id)
            pool.emplace_back(work, id);
        for (auto& th : pool)
            th.join();
    }

    grid.raw.resize(static_cast<std::size_t>(g) * g);
    grid.mass.resize(grid.raw.size());
    const auto at = [&](int i, int j) { return phi[static_cast<std::size_t>(i) * w + j]; };
    for (int r = 0; r < g; ++r)
        for (int c = 0; c < g; ++c) {
            const int i = r + 1, j = c + 1;
            const double lap = at(i - 1, j) + at(i + 1, j) + at(i, j - 1) + at(i, j + 1) - 4.0 * at(i, j);
            const double m = lap / (2.0 * std::numbers::pi);
            grid.raw[static_cast<std::size_t>(r) * g + c] = m;
            grid.mass[static_cast<std::size_t>(r) * g + c] = std::max(0.0, m);
        }
    return grid;
}

double region_mass(const PointMeasure& m, const Region& b)
{
    double s = 0.0;
    for (const auto& a : m.atoms())
        if (b.contains(a.location))
            s += a.weight;
    return s;
}

double measure_distance(const PointMeasure& a, const PointMeasure& b)
{
    constexpr double kWeightTol = 1e-12;
    const auto group = [&](const PointMeasure& m) {
        std::vector<std::pair<double, std::vector<Complex>>> groups;
        for (const auto& atom : m.atoms()) {
            auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const auto& gr) { return std::abs(gr.first - atom.weight) <= kWeightTol; });
            if (it == groups.end())
                groups.push_back({atom.weight, {atom.location}});
            else
                it->second.push_back(atom.location);
        }
        std::sort(groups.begin(), groups.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        return groups;
    };
    const auto ga = group(a);
    const auto gb = group(b);
    if (ga.size() != gb.size())
        return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < ga.size(); ++i) {
        if (std::abs(ga[i].first - gb[i].first) > kWeightTol)
            return std::numeric_limits<double>::infinity();
        worst = std::max(worst, multiset_distance(ga[i].second, gb[i].second));
    }
    return worst;
}

}  // namespace sporder
