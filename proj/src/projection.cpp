#include "sporder/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "sporder/random.hpp"

namespace sporder {

SpectralAnalysis analyze(const ComplexMatrix& t)
{
    SpectralAnalysis a;
    a.schur = schur_form(t);
    a.norm = operator_norm(t);
    a.delta = clustering_threshold(a.norm);
    const auto diag = a.schur.diag_order();
    a.clusters = cluster_values(diag, a.delta);
    return a;
}

namespace {

std::vector<bool> classify(const SpectralAnalysis& a, const Region& b, BoundaryPolicy policy)
{
    const auto diag = a.schur.diag_order();
    std::vector<bool> inside(a.clusters.size());
    for (std::size_t c = 0; c < a.clusters.size(); ++c) {
        const Cluster& cl = a.clusters[c];
        if (policy == BoundaryPolicy::ByCenter) {
            inside[c] = b.contains(cl.center);
        } else {
            std::vector<Complex> members;
            for (auto m : cl.members)
                members.push_back(diag[m]);
            inside[c] = region_contains_cluster(b, cl.center, members);
        }
    }
    return inside;
}

}  // namespace

Projection InvariantSplit::projection() const
{
    const Eigen::Index n = schur.unitary.rows();
    Projection p;
    p.rank = rank;
    if (rank == 0) {
        p.matrix = ComplexMatrix::Zero(n, n);
    } else {
        const auto lead = schur.unitary.leftCols(rank);
        p.matrix = lead * lead.adjoint();
    }
    return p;
}

namespace {

InvariantSplit split_ordered(const SpectralAnalysis& a, const std::vector<bool>& inside,
                             const std::vector<int>& cluster_rank)
{
    if (inside.size() != a.clusters.size() || cluster_rank.size() != a.clusters.size())
        throw std::invalid_argument("hs_projection_ordered: one flag and one rank per cluster required");
    const auto n = static_cast<std::size_t>(a.n());
    int shift = 1;
    for (int r : cluster_rank) {
        if (r < 0)
            throw std::invalid_argument("hs_projection_ordered: ranks must be nonnegative");
        shift = std::max(shift, r + 1);
    }
    std::vector<int> rank(n);
    int k = 0;
    for (std::size_t c = 0; c < a.clusters.size(); ++c) {
        for (auto m : a.clusters[c].members)
            rank[m] = cluster_rank[c] + (inside[c] ? 0 : shift);
        if (inside[c])
            k += static_cast<int>(a.clusters[c].members.size());
    }
    return InvariantSplit{reorder_by_rank(a.schur, rank), k};
}

}  // namespace

Projection hs_projection_ordered(const SpectralAnalysis& a, const std::vector<bool>& inside,
                                 const std::vector<int>& cluster_rank)
{
    return split_ordered(a, inside, cluster_rank).projection();
}

InvariantSplit hs_split(const SpectralAnalysis& a, const Region& b, BoundaryPolicy policy)
{
    return split_ordered(a, classify(a, b, policy), std::vector<int>(a.clusters.size(), 0));
}

Projection hs_projection(const SpectralAnalysis& a, const Region& b, BoundaryPolicy policy)
{
    return hs_split(a, b, policy).projection();
}

Projection hs_projection(const ComplexMatrix& t, const Region& b, BoundaryPolicy policy)
{
    return hs_projection(analyze(t), b, policy);
}

ComplexMatrix range_basis(const Projection& p)
{
    const Eigen::Index n = p.size();
    if (p.rank == 0)
        return ComplexMatrix(n, 0);
    const ComplexMatrix h = 0.5 * (p.matrix + p.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    // eigenvalues ascend; the top `rank` ones are the unit eigenvalues
    return es.eigenvectors().rightCols(p.rank);
}

PointMeasure compression_brown(const ComplexMatrix& t, const Projection& p, Corner corner)
{
    Projection q = p;
    if (corner == Corner::Outside) {
        q.matrix = ComplexMatrix::Identity(p.size(), p.size()) - p.matrix;
        q.rank = static_cast<int>(p.size()) - p.rank;
    }
    if (q.rank <= 0)
        throw std::invalid_argument("compression to a zero corner");
    const ComplexMatrix v = range_basis(q);
    const ComplexMatrix a = v.adjoint() * t * v;
    const auto eig = schur_form(a).diag_order();
    return counting_measure(eig, clustering_threshold(operator_norm(t)));
}

double invariance_defect(const ComplexMatrix& t, const ComplexMatrix& p)
{
    const Eigen::Index n = t.rows();
    return ((ComplexMatrix::Identity(n, n) - p) * t * p).norm();
}

double local_growth(const ComplexMatrix& t, const ComplexVector& xi, int m)
{
    if (m < 1)
        throw std::invalid_argument("local_growth: m must be >= 1");
    const double n0 = xi.norm();
    if (n0 == 0.0)
        return 0.0;
    ComplexVector v = xi / n0;
    double log_sum = 0.0;
    for (int i = 0; i < m; ++i) {
        v = t * v;
        const double nv = v.norm();
        if (nv == 0.0)
            return 0.0;
        log_sum += std::log(nv);
        v /= nv;
    }
    return std::exp(log_sum / m);
}

GrowthReport ball_growth_check(const ComplexMatrix& t, double r, int trials, int m_max, std::uint64_t seed)
{
    if (!(r >= 0.0))
        throw std::invalid_argument("ball_growth_check: r must be >= 0");
    GrowthReport rep;
    rep.radius = r;
    const SpectralAnalysis a = analyze(t);
    const double touch = 1e-6 * std::max(1.0, a.norm);
    double nearest_outside = std::numeric_limits<double>::infinity();
    for (const auto& c : a.clusters) {
        const double mod = std::abs(c.center);
        if (std::abs(mod - r) <= touch) {
            rep.skipped = true;
            rep.note = "spectrum touches the circle |z| = r";
            return rep;
        }
        if (mod > r)
            nearest_outside = std::min(nearest_outside, mod);
    }
    const Projection p = hs_projection(a, Region::disk(0.0, r), BoundaryPolicy::ByCenter);
    Rng rng(seed);
    const Eigen::Index n = t.rows();
    if (p.rank > 0) {
        for (int i = 0; i < trials; ++i) {
            const ComplexVector xi = p.matrix * rng.unit_vector(n);
            rep.inside_max = std::max(rep.inside_max, local_growth(t, xi, m_max));
        }
        if (rep.inside_max > r + 0.1)
            rep.pass = false;
    }
    if (p.rank < n) {
        rep.outside_bound = r + 0.5 * (nearest_outside - r);
        rep.outside_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i < trials; ++i)
            rep.outside_min = std::min(rep.outside_min, local_growth(t, rng.unit_vector(n), m_max));
        if (rep.outside_min < rep.outside_bound)
            rep.pass = false;
    }
    return rep;
}

ComplexMatrix solve_triangular_sylvester(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c)
{
    const Eigen::Index p = a.rows(), q = b.rows();
    ComplexMatrix z(p, q);
    for (Eigen::Index j = 0; j < q; ++j) {
        ComplexVector rhs = c.col(j);
        for (Eigen::Index i = 0; i < j; ++i)
            rhs += b(i, j) * z.col(i);
        ComplexMatrix shifted = a;
        shifted.diagonal().array() -= b(j, j);
        z.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }
    return z;
}

namespace {

ComplexMatrix random_polynomial(const ComplexMatrix& x, int degree, Rng& rng)
{
    const Eigen::Index n = x.rows();
    ComplexMatrix acc = rng.complex_gaussian() * ComplexMatrix::Identity(n, n);
    ComplexMatrix power = ComplexMatrix::Identity(n, n);
    for (int j = 1; j <= degree; ++j) {
        power = power * x;
        acc += rng.complex_gaussian() * power;
    }
    return acc;
}

}  // namespace

HyperinvarianceReport hyperinvariance_check(const ComplexMatrix& t, const Projection& p, int samples,
                                            std::uint64_t seed)
{
    HyperinvarianceReport rep;
    const SpectralAnalysis a = analyze(t);
    const Eigen::Index n = a.n();

    // Cluster-contiguous Schur form and offsets of each block.
    std::vector<int> rank(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < a.clusters.size(); ++c)
        for (auto m : a.clusters[c].members)
            rank[m] = static_cast<int>(c);
    const SchurForm s = reorder_by_rank(a.schur, rank);
    std::vector<Eigen::Index> offset{0};
    for (const auto& c : a.clusters)
        offset.push_back(offset.back() + static_cast<Eigen::Index>(c.members.size()));
    const std::size_t k = a.clusters.size();

    // X^{-1} R X block diagonal, one Sylvester solve per leading block.
    ComplexMatrix r = s.triangular;
    ComplexMatrix x = ComplexMatrix::Identity(n, n);
    ComplexMatrix x_inv = ComplexMatrix::Identity(n, n);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const Eigen::Index o = offset[i], w = offset[i + 1] - o, rest = n - offset[i + 1];
        const ComplexMatrix z = solve_triangular_sylvester(r.block(o, o, w, w), r.block(o + w, o + w, rest, rest),
                                                           -r.block(o, o + w, w, rest));
        ComplexMatrix y = ComplexMatrix::Identity(n, n), y_inv = ComplexMatrix::Identity(n, n);
        y.block(o, o + w, w, rest) = z;
        y_inv.block(o, o + w, w, rest) = -z;
        r = y_inv * r * y;
        x = x * y;
        x_inv = y_inv * x_inv;
    }

    std::vector<bool> scalar(k);
    for (std::size_t c = 0; c < k; ++c) {
        const Eigen::Index o = offset[c], w = offset[c + 1] - o;
        ComplexMatrix nil = r.block(o, o, w, w);
        nil.diagonal().array() -= a.clusters[c].center;
        scalar[c] = nil.cwiseAbs().maxCoeff() <= a.delta;
        if (!scalar[c])
            rep.partial_commutant = true;
    }

    Rng rng(seed);
    const ComplexMatrix t_unit = a.norm > 0.0 ? ComplexMatrix(t / a.norm) : t;
    const Eigen::Index i_n = n;
    const ComplexMatrix compl_p = ComplexMatrix::Identity(i_n, i_n) - p.matrix;
    for (int sample = 0; sample < samples; ++sample) {
        ComplexMatrix sm;
        if (sample % 2 == 0) {
            const int degree = static_cast<int>(rng.uniform_int(1, std::max<Eigen::Index>(1, n)));
            sm = random_polynomial(t_unit, degree, rng);
        } else {
            ComplexMatrix block = ComplexMatrix::Zero(n, n);
            for (std::size_t c = 0; c < k; ++c) {
                const Eigen::Index o = offset[c], w = offset[c + 1] - o;
                if (scalar[c]) {
                    block.block(o, o, w, w) = rng.complex_gaussian_matrix(w, w);
                } else {
                    ComplexMatrix nil = r.block(o, o, w, w);
                    nil.diagonal().array() -= a.clusters[c].center;
                    nil /= operator_norm(nil);
                    block.block(o, o, w, w) =
                        random_polynomial(nil, static_cast<int>(rng.uniform_int(1, w)), rng);
                }
            }
            sm = s.unitary * x * block * x_inv * s.unitary.adjoint();
        }
        const double s_norm = operator_norm(sm);
        if (s_norm == 0.0)
            continue;
        sm /= s_norm;
        const double comm = (sm * t - t * sm).norm() / std::max(1.0, a.norm);
        if (comm > 1e-9) {
            ++rep.rejected;
            rep.worst_commutator = std::max(rep.worst_commutator, comm);
            continue;
        }
        ++rep.accepted;
        rep.worst_commutator = std::max(rep.worst_commutator, comm);
        rep.worst_leak = std::max(rep.worst_leak, (compl_p * sm * p.matrix).norm());
    }
    rep.pass = rep.accepted > 0 && rep.worst_leak <= 1e-8;
    if (rep.partial_commutant)
        rep.note = "non-scalar cluster blocks sampled through polynomials only";
    if (rep.rejected > 0)
        rep.note += std::string(rep.note.empty() ? "" : "; ") + std::to_string(rep.rejected) +
                    " samples dropped for commutator above 1e-9";
    return rep;
}

}  // namespace sporder
