#include "sporder/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sporder/brown.hpp"
#include "sporder/matrix_io.hpp"
#include "sporder/random.hpp"
#include "sporder/spectral.hpp"

namespace sporder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv64(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t seed_for(const VerifyOptions& o, const std::string& id)
{
    return fnv64(id) ^ o.seed;
}

double scale_of(double norm) { return std::max(1.0, norm); }

CheckReport start(const std::string& id, const std::string& anchor, const ComplexMatrix& t, const std::string& extra,
                  const VerifyOptions& o)
{
    CheckReport r;
    r.id = id;
    r.anchor = anchor;
    r.digest = inputs_digest(t, extra, o.seed);
    r.tolerance = o.tol_structural;
    return r;
}

// Diagonal and largest strictly-lower magnitude of a nearly triangular matrix.
struct Triangular {
    std::vector<Complex> diag;
    double lower = 0.0;
};

Triangular triangular_part(const ComplexMatrix& a)
{
    Triangular out;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        out.diag.push_back(a(j, j));
        for (Eigen::Index i = j + 1; i < a.rows(); ++i)
            out.lower = std::max(out.lower, std::abs(a(i, j)));
    }
    return out;
}

std::pair<std::size_t, double> nearest(const std::vector<Complex>& centers, Complex z)
{
    std::size_t best = 0;
    double dist = kInf;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double d = std::abs(centers[i] - z);
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return {best, dist};
}

// Number of eigenvalues (with multiplicity) of the counting measure in b.
int counted_in(const PointMeasure& m, const Region& b, Eigen::Index n)
{
    int count = 0;
    for (const auto& a : m.atoms())
        if (b.contains(a.location))
            count += static_cast<int>(std::lround(a.weight * static_cast<double>(n)));
    return count;
}

Region simple_region(Rng& rng, double radius, const std::vector<Complex>& centers)
{
    const double h = 1.5 * radius;
    switch (rng.uniform_int(0, 4)) {
    case 0:
        return Region::disk({(2.0 * rng.uniform() - 1.0) * radius, (2.0 * rng.uniform() - 1.0) * radius},
                            rng.uniform() * h);
    case 1: {
        const Complex c = centers.empty() ? Complex(0.0) : centers[static_cast<std::size_t>(
                                                               rng.uniform_int(0, static_cast<std::int64_t>(centers.size()) - 1))];
        return Region::disk(c, rng.uniform() * radius);
    }
    case 2: {
        const double a = 2.0 * std::numbers::pi * rng.uniform();
        return Region::halfplane(std::cos(a), std::sin(a), (2.0 * rng.uniform() - 1.0) * radius);
    }
    case 3: {
        const int level = static_cast<int>(rng.uniform_int(1, 4));
        const std::uint64_t count = std::uint64_t{1} << (2 * level);
        std::vector<std::uint64_t> ks;
        for (std::uint64_t k = 1; k <= count; ++k)
            if (rng.uniform() < 0.5)
                ks.push_back(k);
        return Region::cells(radius, level, ks);
    }
    default: {
        // the grid cell holding a spectral point: edges pass through clustered spectra
        const Complex c = centers.empty() ? Complex(0.0) : centers[static_cast<std::size_t>(
                                                               rng.uniform_int(0, static_cast<std::int64_t>(centers.size()) - 1))];
        const int level = static_cast<int>(rng.uniform_int(1, 6));
        const auto k = grid_cell_index(c, radius, level);
        return Region::cells(radius, level, {k.value_or(1)});
    }
    }
}

Region random_region(Rng& rng, double radius, const std::vector<Complex>& centers)
{
    switch (rng.uniform_int(0, 4)) {
    case 0: {
        const Region a = simple_region(rng, radius, centers);
        return a & simple_region(rng, radius, centers);
    }
    case 1: {
        const Region a = simple_region(rng, radius, centers);
        return a | simple_region(rng, radius, centers);
    }
    case 2: return !simple_region(rng, radius, centers);
    default: return simple_region(rng, radius, centers);
    }
}

Dyadic random_param(Rng& rng, int depth)
{
    const int bits = 2 * depth;
    const std::uint64_t v = bits >= 64 ? rng.bits() : rng.bits() >> (64 - bits);
    return Dyadic::from_index(v, bits);
}

std::vector<Complex> analysis_centers(const SpectralAnalysis& a)
{
    std::vector<Complex> out;
    for (const auto& c : a.clusters)
        out.push_back(c.center);
    return out;
}

double relative_det_gap(double log_a, double log_b)
{
    if (std::isinf(log_a) && std::isinf(log_b) && log_a < 0 && log_b < 0)
        return 0.0;
    if (std::isinf(log_a) || std::isinf(log_b))
        return kInf;
    return std::abs(std::expm1(log_a - log_b));
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

const std::vector<std::string>& check_ids()
{
    static const std::vector<std::string> ids{
        "decomposition",  "flag-identity",      "measure-laws", "hs-flags",      "hs-monotonicity",
        "hs-hyperinvariance", "convergence",    "block-split",  "block-expectation", "brown-density",
        "ordering-witness",
    };
    return ids;
}

bool is_check_id(const std::string& id)
{
    const auto& ids = check_ids();
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::string inputs_digest(const ComplexMatrix& t, const std::string& extra, std::uint64_t seed)
{
    return fnv1a_hex(matrix_to_string(t) + "|" + extra + "|" + std::to_string(seed));
}

CheckReport verify_decomposition(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o)
{
    CheckReport r = start("decomposition", "T = N + Q, N normal, nu_N = nu_T, spectrum(Q) = {0}", t, c.spec(), o);
    const Decomposition d = decompose(t, c);
    const double s = scale_of(d.table.norm);

    r.add("reconstruction_rel", (t - d.n - d.q).norm() / std::max(1.0, t.norm()), 1e-14);
    const double nf2 = d.n.squaredNorm();
    const double normality = nf2 > 0.0 ? (d.n * d.n.adjoint() - d.n.adjoint() * d.n).norm() / nf2 : 0.0;
    r.add("normality_rel", normality, o.tol_structural);

    const auto eig_t = d.table.schur.diag_order();
    const auto eig_n = schur_form(d.n).diag_order();
    r.add("spectrum_distance_N_T", multiset_distance(eig_n, eig_t), o.tol_spectrum);
    r.add("brown_distance_N_T", measure_distance(empirical_brown(d.n), empirical_brown(t)), o.tol_spectrum);

    const TriangularResidual q = nilpotent_residual(d);
    r.add("q_schur_strict_lower", q.strict_lower, o.tol_backward * s);
    r.add("q_eigenvalue_modulus", q.diagonal, o.tol_spectrum * s);
    r.note = "spectrum of Q read off the diagonal of Q in the ordered Schur basis, where Q is triangular up to "
             "q_schur_strict_lower";
    r.finalize();
    return r;
}

CheckReport verify_flag_identity(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o)
{
    CheckReport r = start("flag-identity", "E(psi([0,t])) = P_T(psi([0,t]))", t, c.spec(), o);
    const SpectralTable table = build_spectral_table(t, c);
    const SpectralAnalysis a = analyze(t);
    Rng rng(seed_for(o, r.id));

    std::vector<Dyadic> ts = table.params;
    for (int i = 0; i < o.flag_samples; ++i)
        ts.push_back(random_param(rng, c.depth()));
    double worst = 0.0;
    int rank_mismatch = 0;
    for (const Dyadic s : ts) {
        const Region b = Region::curve_prefix(c, s, true);
        const Projection e = spectral_projection(table, b, BoundaryPolicy::ByCenter);
        const Projection p = hs_projection(a, b, BoundaryPolicy::ByCenter);
        worst = std::max(worst, (e.matrix - p.matrix).norm());
        if (e.rank != p.rank)
            ++rank_mismatch;
    }
    r.add("max_frobenius_gap", worst, o.tol_structural);
    r.add("rank_mismatches", rank_mismatch, 0);
    r.note = std::to_string(ts.size()) + " parameters (every cluster parameter plus " +
             std::to_string(o.flag_samples) + " random)";
    r.finalize();
    return r;
}

CheckReport verify_measure_laws(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o)
{
    CheckReport r = start("measure-laws",
                          "tau(E(B)) = nu_T(B); E(B1)E(B2) = E(B1 & B2); E additive on disjoint sets", t, c.spec(), o);
    const SpectralTable table = build_spectral_table(t, c);
    const PointMeasure nu = empirical_brown(t);
    const Eigen::Index n = t.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    Rng rng(seed_for(o, r.id));

    std::vector<Region> regions;
    std::vector<Projection> es;
    for (int i = 0; i < o.regions; ++i) {
        regions.push_back(random_region(rng, table.radius, table.centers));
        es.push_back(spectral_projection(table, regions.back(), BoundaryPolicy::ByCenter));
    }

    int trace_mismatch = 0;
    double trace_gap = 0.0, defect = 0.0, product = 0.0, additivity = 0.0, complement = 0.0;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const Projection& e = es[i];
        if (e.rank != counted_in(nu, regions[i], n))
            ++trace_mismatch;
        trace_gap = std::max(trace_gap, std::abs(normalized_trace(e.matrix) - e.trace()));
        defect = std::max(defect, projection_defect(e.matrix));

        const std::size_t j = (i + 1) % regions.size();
        const Projection both = spectral_projection(table, regions[i] & regions[j], BoundaryPolicy::ByCenter);
        product = std::max(product, (e.matrix * es[j].matrix - both.matrix).norm());

        const Projection rest = spectral_projection(table, !regions[i], BoundaryPolicy::ByCenter);
        complement = std::max(complement, (e.matrix + rest.matrix - id).norm());

        // finite partition of B by the grid cells of a small level
        const int level = 1 + static_cast<int>(i % 3);
        ComplexMatrix sum = ComplexMatrix::Zero(n, n);
        for (const Region& cell : dyadic_cells(table.radius, level))
            sum += spectral_projection(table, regions[i] & cell, BoundaryPolicy::ByCenter).matrix;
        additivity = std::max(additivity, (sum - e.matrix).norm());
    }
    r.add("trace_rank_mismatches", trace_mismatch, 0);
    r.add("trace_vs_rank", trace_gap, o.tol_structural);
    r.add("projection_defect", defect, o.tol_structural);
    r.add("product_gap", product, o.tol_structural);
    r.add("complement_gap", complement, o.tol_structural);
    r.add("cell_partition_gap", additivity, o.tol_structural);
    r.note = std::to_string(o.regions) + " random regions";
    r.finalize();
    return r;
}

CheckReport verify_hs_flags(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o)
{
    CheckReport r = start("hs-flags",
                          "tau(P) = nu_T(B); (1-P)TP = 0; nu of TP in B, nu of (1-P)T outside B", t, c.spec(), o);
    const SpectralTable table = build_spectral_table(t, c);
    const PointMeasure nu = empirical_brown(t);
    const Eigen::Index n = t.rows();
    const double s = scale_of(table.norm);
    const ComplexMatrix& u = table.schur.unitary;

    int trace_mismatch = 0, inside_violations = 0, outside_violations = 0;
    double invariance = 0.0, defect = 0.0, lower = 0.0, location = 0.0;
    const auto check_corner = [&](const ComplexMatrix& basis, bool inside_side, std::size_t last_inside) {
        const Triangular tri = triangular_part(basis.adjoint() * t * basis);
        lower = std::max(lower, tri.lower);
        int bad = 0;
        for (const Complex z : tri.diag) {
            const auto [idx, dist] = nearest(table.centers, z);
            location = std::max(location, dist);
            const bool in = idx <= last_inside;
            if (in != inside_side)
                ++bad;
        }
        return bad;
    };
    for (std::size_t i = 0; i < table.cluster_count(); ++i) {
        const Region b = Region::curve_prefix(c, table.params[i], true);
        const Projection p = flag_projection(table, table.params[i]);
        if (p.rank != counted_in(nu, b, n))
            ++trace_mismatch;
        invariance = std::max(invariance, invariance_defect(t, p.matrix));
        defect = std::max(defect, projection_defect(p.matrix));
        inside_violations += check_corner(u.leftCols(p.rank), true, i);
        if (p.rank < n)
            outside_violations += check_corner(u.rightCols(n - p.rank), false, i);
    }
    r.add("trace_mismatches", trace_mismatch, 0);
    r.add("invariance_defect_rel", invariance / std::max(table.norm, std::numeric_limits<double>::min()),
          o.tol_structural);
    r.add("projection_defect", defect, o.tol_structural);
    r.add("compression_strict_lower", lower, o.tol_backward * s);
    r.add("compression_eigenvalue_offset", location, o.tol_spectrum * s);
    r.add("inside_atoms_outside_region", inside_violations, 0);
    r.add("outside_atoms_inside_region", outside_violations, 0);
    r.note = std::to_string(table.cluster_count()) +
             " flag projections; compression spectra read off the triangular compressions in the Schur basis";
    r.finalize();
    return r;
}

CheckReport verify_hs_monotonicity(const ComplexMatrix& t, const VerifyOptions& o)
{
    CheckReport r = start("hs-monotonicity", "B1 in B2 => P(B1) <= P(B2); P(B) independent of interior order", t,
                          "", o);
    const SpectralAnalysis a = analyze(t);
    const auto centers = analysis_centers(a);
    const double radius = a.norm > 0.0 ? a.norm : 1.0;
    Rng rng(seed_for(o, r.id));

    double nested = 0.0;
    for (int i = 0; i < o.nested_pairs; ++i) {
        const Region outer = random_region(rng, radius, centers);
        const Region inner = outer & random_region(rng, radius, centers);
        const Projection p1 = hs_projection(a, inner, BoundaryPolicy::ByCenter);
        const Projection p2 = hs_projection(a, outer, BoundaryPolicy::ByCenter);
        nested = std::max(nested, (p1.matrix - p1.matrix * p2.matrix).norm());
    }
    double order_gap = 0.0;
    const std::size_t k = a.clusters.size();
    for (int i = 0; i < o.order_trials; ++i) {
        const Region b = random_region(rng, radius, centers);
        std::vector<bool> inside(k);
        for (std::size_t c = 0; c < k; ++c)
            inside[c] = b.contains(a.clusters[c].center);
        std::vector<int> r1(k), r2(k);
        for (std::size_t c = 0; c < k; ++c) {
            r1[c] = static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(k)));
            r2[c] = static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(k)));
        }
        const Projection p1 = hs_projection_ordered(a, inside, r1);
        const Projection p2 = hs_projection_ordered(a, inside, r2);
        order_gap = std::max(order_gap, (p1.matrix - p2.matrix).norm());
    }
    r.add("nested_gap", nested, o.tol_structural);
    r.add("interior_order_gap", order_gap, o.tol_structural);
    r.note = std::to_string(o.nested_pairs) + " nested pairs, " + std::to_string(o.order_trials) + " reorderings";
    r.finalize();
    return r;
}

CheckReport verify_hyperinvariance(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o)
{
    CheckReport r = start("hs-hyperinvariance", "(1-P)SP = 0 for sampled S with ST = TS", t, c.spec(), o);
    if (t.rows() > o.hyper_max_n) {
        r.skip("commutant sampling limited to n <= " + std::to_string(o.hyper_max_n));
        return r;
    }
    const SpectralTable table = build_spectral_table(t, c);
    const std::size_t k = table.cluster_count();
    std::vector<std::size_t> picks{0, k / 2, k > 1 ? k - 2 : 0};
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    double leak = 0.0, comm = 0.0;
    int accepted = 0, rejected = 0;
    bool partial = false;
    std::uint64_t seed = seed_for(o, r.id);
    for (const auto i : picks) {
        const Projection p = flag_projection(table, table.params[i]);
        const HyperinvarianceReport h = hyperinvariance_check(t, p, o.hyper_samples, seed++);
        leak = std::max(leak, h.worst_leak);
        comm = std::max(comm, h.worst_commutator);
        accepted += h.accepted;
        rejected += h.rejected;
        partial = partial || h.partial_commutant;
    }
    r.add("worst_leak", leak, 1e-8);
    r.add("accepted_samples", accepted, 1, Relation::Ge);
    r.note = std::to_string(accepted) + " commuting samples, " + std::to_string(rejected) +
             " dropped (commutator above 1e-9, worst " + fmt(comm) + ")";
    if (partial)
        r.note += "; non-scalar cluster blocks sampled through polynomials only";
    r.finalize();
    return r;
}

CheckReport verify_convergence(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o)
{
    CheckReport r = start("convergence",
                          "||E_D(X) - E_Dn(X)|| <= 3 sqrt2 ||X|| / 2^n; spectrum(X - E_Dn(X)) in radius 6 sqrt2 ||X|| / "
                          "2^n; binomial power bound; X = E_D'(T)",
                          t, c.spec(), o);
    const SpectralTable table = build_spectral_table(t, c);
    const ComplexMatrix x = block_diagonal_expectation(table);
    const double xnorm = operator_norm(x);
    const double s = scale_of(table.norm);
    const Eigen::Index n = t.rows();
    const ComplexMatrix& u = table.schur.unitary;

    double commutator = 0.0;
    for (const auto& e : table.cluster_projs)
        commutator = std::max(commutator, (x * e - e * x).norm());
    if (commutator > o.tol_structural * s) {
        r.skip("block-diagonal expectation fails to commute with E({z}) (" + fmt(commutator) + ")");
        return r;
    }
    if (xnorm == 0.0) {
        r.add("commutator_with_E", commutator, o.tol_structural * s);
        r.note = "E_D'(T) = 0: every bound holds with equality at zero";
        r.finalize();
        return r;
    }
    r.add("commutator_with_E", commutator, o.tol_structural * s);

    const ComplexMatrix limit = abelian_expectation(table, x);
    const Complex tau_x = normalized_trace(x);
    double trace_gap = 0.0, lower = 0.0;
    for (int level = 1; level <= o.n_max; ++level) {
        const double cell = std::ldexp(1.0, -level);
        const ComplexMatrix en = dyadic_expectation(table, x, level, xnorm);
        trace_gap = std::max(trace_gap, std::abs(normalized_trace(en) - tau_x));
        r.add("rate[n=" + std::to_string(level) + "]", operator_norm(limit - en), 3.0 * std::numbers::sqrt2 * xnorm * cell);
        const Triangular tri = triangular_part(u.adjoint() * (x - en) * u);
        lower = std::max(lower, tri.lower);
        double radius = 0.0;
        for (const Complex z : tri.diag)
            radius = std::max(radius, std::abs(z));
        r.add("spectral_radius[n=" + std::to_string(level) + "]", radius,
              6.0 * std::numbers::sqrt2 * xnorm * cell);
    }
    r.add("trace_preservation", trace_gap, o.tol_structural * s);

    // (X - E_D X)^2: the final radius bound at the finest level
    const Triangular tail = triangular_part(u.adjoint() * (x - limit) * u);
    lower = std::max(lower, tail.lower);
    double sq_radius = 0.0;
    for (const Complex z : tail.diag)
        sq_radius = std::max(sq_radius, std::norm(z));
    r.add("squared_defect_radius", sq_radius, 28.0 * std::numbers::sqrt2 * xnorm * std::ldexp(1.0, -o.n_max));
    r.add("triangular_strict_lower", lower, o.tol_backward * s);

    // binomial bound, verbatim, on Y = X / (2 ||X||)
    const double f = 0.5 / xnorm;
    const ComplexMatrix y = f * x;
    const ComplexMatrix y_defect = y - f * limit;
    Rng rng(seed_for(o, r.id));
    double ratio = 0.0;
    for (int level = 1; level <= o.binomial_levels; ++level) {
        const ComplexMatrix y_grid = y - f * dyadic_expectation(table, x, level, xnorm);
        const double grid_term = 3.0 * std::numbers::sqrt2 * 0.5 * std::ldexp(1.0, -level);
        for (int v = 0; v < o.binomial_vectors; ++v) {
            const ComplexVector eta = rng.unit_vector(n);
            ComplexVector lhs = eta, rhs = eta;
            for (int m = 1; m <= o.binomial_m; ++m) {
                lhs = y_defect * (y_defect * lhs);
                rhs = y_grid * rhs;
                const double bound = std::pow(4.0, m) * std::max(std::pow(grid_term, m), rhs.norm());
                const double left = lhs.norm();
                if (left > 0.0)
                    ratio = std::max(ratio, bound > 0.0 ? left / bound : kInf);
            }
        }
    }
    r.add("binomial_ratio", ratio, 1.0 + o.tol_structural);
    r.note = "X = E_D'(T), ||X|| = " + fmt(xnorm) + "; grid on the square of side 3||X||; levels 1.." +
             std::to_string(o.n_max) + "; binomial bound for m <= " + std::to_string(o.binomial_m) + ", n <= " +
             std::to_string(o.binomial_levels) + ", " + std::to_string(o.binomial_vectors) + " unit vectors";
    r.finalize();
    return r;
}

namespace {

struct SplitMeasures {
    double invariance = 0.0;
    double det_gap = 0.0;
    bool det_skipped = false;
    double measure_gap = 0.0;
    double lower = 0.0;
};

// Compressions to range(p) and its complement in the given orthonormal bases.
SplitMeasures split_measures(const ComplexMatrix& t, const ComplexMatrix& p, const ComplexMatrix& v,
                             const ComplexMatrix& w, double delta, double singular_below)
{
    SplitMeasures m;
    const Eigen::Index n = t.rows();
    m.invariance = invariance_defect(t, p);

    std::vector<Complex> eig_t = schur_form(t).diag_order();
    double smallest = kInf;
    for (const Complex z : eig_t)
        smallest = std::min(smallest, std::abs(z));

    std::vector<Atom> atoms;
    double log_sum = 0.0;
    const auto corner = [&](const ComplexMatrix& basis) {
        if (basis.cols() == 0)
            return;
        const ComplexMatrix a = basis.adjoint() * t * basis;
        const Eigen::Index k = a.rows();
        Triangular tri = triangular_part(a);
        if (tri.lower > singular_below)
            tri.diag = schur_form(a).diag_order();
        else
            m.lower = std::max(m.lower, tri.lower);
        log_sum += static_cast<double>(k) * log_fk_determinant(a);
        const PointMeasure part = counting_measure(tri.diag, delta);
        for (const auto& atom : part.atoms())
            atoms.push_back({atom.location, atom.weight * static_cast<double>(k) / static_cast<double>(n)});
    };
    corner(v);
    corner(w);

    // atoms of the two corners at the same point merge
    std::vector<Complex> locs;
    for (const auto& a : atoms)
        locs.push_back(a.location);
    std::vector<Atom> merged;
    for (const auto& cl : cluster_values(locs, delta)) {
        double weight = 0.0;
        for (auto i : cl.members)
            weight += atoms[i].weight;
        merged.push_back({cl.center, weight});
    }
    m.measure_gap = measure_distance(PointMeasure(merged), counting_measure(eig_t, delta));

    if (smallest <= delta) {
        m.det_skipped = true;
    } else {
        const double log_t = static_cast<double>(n) * log_fk_determinant(t);
        m.det_gap = relative_det_gap(log_t / static_cast<double>(n), log_sum / static_cast<double>(n));
    }
    return m;
}

}  // namespace

CheckReport verify_block_split(const ComplexMatrix& t, const Projection& p, const VerifyOptions& o)
{
    CheckReport r = start("block-split", "Delta(T) = Delta(A)^tau(p) Delta(C)^tau(1-p); nu_T = tau(p) nu_A + tau(1-p) nu_C",
                          t, "projection rank " + std::to_string(p.rank), o);
    const double norm = operator_norm(t);
    const double s = scale_of(norm);
    if (invariance_defect(t, p.matrix) > o.tol_structural * s)
        throw std::invalid_argument("block split needs a T-invariant projection");
    const Eigen::Index n = t.rows();
    Projection q{ComplexMatrix::Identity(n, n) - p.matrix, static_cast<int>(n) - p.rank};
    const SplitMeasures m = split_measures(t, p.matrix, range_basis(p), range_basis(q), clustering_threshold(norm),
                                           o.tol_backward * s);
    r.add("invariance_defect", m.invariance, o.tol_structural * s);
    if (!m.det_skipped)
        r.add("determinant_rel", m.det_gap, o.tol_det);
    r.add("measure_distance", m.measure_gap, o.tol_spectrum * s);
    if (m.det_skipped)
        r.note = "T numerically singular: determinant identity not evaluated";
    r.finalize();
    return r;
}

CheckReport verify_block_splits(const ComplexMatrix& t, const VerifyOptions& o)
{
    CheckReport r = start("block-split", "Delta(T) = Delta(A)^tau(p) Delta(C)^tau(1-p); nu_T = tau(p) nu_A + tau(1-p) nu_C",
                          t, "", o);
    const SpectralAnalysis a = analyze(t);
    const auto centers = analysis_centers(a);
    const double radius = a.norm > 0.0 ? a.norm : 1.0;
    const double s = scale_of(a.norm);
    Rng rng(seed_for(o, r.id));
    SplitMeasures worst;
    int det_skipped = 0;
    for (int i = 0; i < o.split_pairs; ++i) {
        const InvariantSplit sp = hs_split(a, random_region(rng, radius, centers), BoundaryPolicy::ByCenter);
        const SplitMeasures m = split_measures(t, sp.projection().matrix, sp.range(), sp.corange(), a.delta,
                                               o.tol_backward * s);
        worst.invariance = std::max(worst.invariance, m.invariance);
        worst.measure_gap = std::max(worst.measure_gap, m.measure_gap);
        worst.lower = std::max(worst.lower, m.lower);
        if (m.det_skipped)
            ++det_skipped;
        else
            worst.det_gap = std::max(worst.det_gap, m.det_gap);
    }
    r.add("invariance_defect", worst.invariance, o.tol_structural * s);
    r.add("compression_strict_lower", worst.lower, o.tol_backward * s);
    r.add("measure_distance", worst.measure_gap, o.tol_spectrum * s);
    if (det_skipped < o.split_pairs)
        r.add("determinant_rel", worst.det_gap, o.tol_det);
    r.note = std::to_string(o.split_pairs) + " invariant projections from random regions";
    if (det_skipped > 0)
        r.note += "; T numerically singular, determinant identity not evaluated";
    r.finalize();
    return r;
}

CheckReport verify_block_expectation(const ComplexMatrix& t, const OrderingCurve& c, const VerifyOptions& o)
{
    CheckReport r = start("block-expectation",
                          "Delta(T - l) = Delta(E_D'(T) - l); nu of E(B) X E(B) concentrated in B; flags of T invariant "
                          "for X = E_D'(T)",
                          t, c.spec(), o);
    const SpectralTable table = build_spectral_table(t, c);
    const ComplexMatrix x = block_diagonal_expectation(table);
    const Eigen::Index n = t.rows();
    const double s = scale_of(table.norm);
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    Rng rng(seed_for(o, r.id));

    double det_gap = 0.0;
    for (int i = 0; i < o.shifts; ++i) {
        const Complex lambda((2.0 * rng.uniform() - 1.0) * 1.5 * table.radius,
                             (2.0 * rng.uniform() - 1.0) * 1.5 * table.radius);
        det_gap = std::max(det_gap, relative_det_gap(log_fk_determinant(t - lambda * id),
                                                     log_fk_determinant(x - lambda * id)));
    }
    r.add("shifted_determinant_rel", det_gap, o.tol_shift_det);

    double flag_defect = 0.0;
    for (const auto& f : table.flags)
        flag_defect = std::max(flag_defect, invariance_defect(x, f));
    r.add("flag_invariance_for_X", flag_defect / std::max(table.norm, std::numeric_limits<double>::min()),
          o.tol_structural);

    int violations = 0, used = 0;
    double lower = 0.0, location = 0.0;
    const ComplexMatrix& u = table.schur.unitary;
    for (int i = 0; i < o.compress_regions; ++i) {
        const Region b = random_region(rng, table.radius, table.centers);
        const auto in = clusters_in(table, b, BoundaryPolicy::ByCenter);
        if (in.empty())
            continue;
        ++used;
        std::vector<Eigen::Index> cols;
        for (auto cl : in)
            for (Eigen::Index j = table.offsets[cl]; j < table.offsets[cl + 1]; ++j)
                cols.push_back(j);
        ComplexMatrix v(n, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j)
            v.col(static_cast<Eigen::Index>(j)) = u.col(cols[j]);
        const Triangular tri = triangular_part(v.adjoint() * x * v);
        lower = std::max(lower, tri.lower);
        for (const Complex z : tri.diag) {
            const auto [idx, dist] = nearest(table.centers, z);
            location = std::max(location, dist);
            if (!b.contains(table.centers[idx]))
                ++violations;
        }
    }
    r.add("compression_strict_lower", lower, o.tol_backward * s);
    r.add("compression_eigenvalue_offset", location, o.tol_spectrum * s);
    r.add("atoms_outside_region", violations, 0);
    r.note = std::to_string(o.shifts) + " shifts; " + std::to_string(used) + " regions with nonzero measure";
    r.finalize();
    return r;
}

CheckReport verify_brown_density(const ComplexMatrix& t, const VerifyOptions& o)
{
    CheckReport r = start("brown-density", "(1/2pi) Laplacian of tau log|T - l| against the counting measure", t,
                          "grid " + std::to_string(o.density_grid), o);
    r.tolerance = o.density_tol;
    const double norm = operator_norm(t);
    const double eps = 1e-3 * scale_of(norm);
    const DensityGrid g = brown_density_grid(t, o.density_grid, eps);
    const auto cells = g.aggregate(o.density_level);
    std::vector<double> counting(cells.size(), 0.0);
    for (const auto& a : empirical_brown(t).atoms()) {
        const auto k = grid_cell_index(a.location, g.radius, o.density_level);
        if (k)
            counting[*k - 1] += a.weight;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i)
        worst = std::max(worst, std::abs(cells[i] - counting[i]));
    r.add("max_cell_gap", worst, o.density_tol);
    r.add("raw_total_low", g.raw_total(), 0.9, Relation::Ge);
    r.add("raw_total_high", g.raw_total(), 1.02);
    r.note = "eps = " + fmt(eps) + ", level " + std::to_string(o.density_level) + " cells; clamped total " +
             fmt(g.clamped_total()) + ", most negative raw cell " + fmt(g.min_raw());
    r.finalize();
    return r;
}

CheckReport verify_ordering_witness(const VerifyOptions& o)
{
    ComplexMatrix t(2, 2);
    t << 1.0, 1.0, 0.0, 2.0;
    CheckReport r = start("ordering-witness", "two orderings of [[1,1],[0,2]] give distinct (N, Q) with equal nu_N", t,
                          "lex | lex:mirror", o);
    const double radius = curve_radius_for(t);
    const Decomposition first = decompose(t, OrderingCurve::parse("lex", radius));
    const Decomposition second = decompose(t, OrderingCurve::parse("lex:mirror", radius));

    ComplexMatrix n1(2, 2), q1(2, 2), n2(2, 2), q2(2, 2);
    n1 << 1.0, 0.0, 0.0, 2.0;
    q1 << 0.0, 1.0, 0.0, 0.0;
    n2 << 1.5, 0.5, 0.5, 1.5;
    q2 << -0.5, 0.5, -0.5, 0.5;
    const auto entry_gap = [](const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); };
    r.add("order_1_2_N_entry_gap", entry_gap(first.n, n1), 1e-10);
    r.add("order_1_2_Q_entry_gap", entry_gap(first.q, q1), 1e-10);
    r.add("order_2_1_N_entry_gap", entry_gap(second.n, n2), 1e-10);
    r.add("order_2_1_Q_entry_gap", entry_gap(second.q, q2), 1e-10);
    r.add("order_2_1_Q_squared", (second.q * second.q).cwiseAbs().maxCoeff(), 1e-10);
    r.add("N_difference", (first.n - second.n).norm(), 0.5, Relation::Ge);
    r.add("brown_distance_between_N", measure_distance(empirical_brown(first.n), empirical_brown(second.n)), 1e-10);
    r.note = "first parameters " + first.table.params[0].to_string() + " < " + first.table.params[1].to_string() +
             " (eigenvalue " + fmt(first.table.centers[0].real()) + " first); mirrored order puts eigenvalue " +
             fmt(second.table.centers[0].real()) + " first";
    r.finalize();
    return r;
}

std::vector<CheckReport> run_checks(const ComplexMatrix& t, const std::string& subject,
                                    const std::vector<std::string>& curve_specs, const VerifyOptions& o,
                                    const std::set<std::string>& only)
{
    require_valid(t);
    for (const auto& id : only)
        if (!is_check_id(id))
            throw std::invalid_argument("unknown check id: " + id);
    const auto wanted = [&](const std::string& id) {
        if (only.empty())
            return id != "brown-density" && id != "ordering-witness";
        return only.count(id) > 0;
    };

    std::vector<CheckReport> out;
    const auto guarded = [&](const std::string& id, const std::string& label, auto&& body) {
        CheckReport rep;
        try {
            rep = body();
        } catch (const CurveSeparationError& e) {
            rep = CheckReport{};
            rep.id = id;
            rep.skip(e.what());
        } catch (const RegionAmbiguity& e) {
            rep = CheckReport{};
            rep.id = id;
            rep.skip(e.what());
        } catch (const std::exception& e) {
            rep = CheckReport{};
            rep.id = id;
            rep.verdict = Verdict::Fail;
            rep.note = std::string("error: ") + e.what();
        }
        rep.subject = label;
        if (rep.digest.empty())
            rep.digest = inputs_digest(t, label, o.seed);
        out.push_back(std::move(rep));
    };

    const double radius = curve_radius_for(t);
    for (const auto& spec : curve_specs) {
        const OrderingCurve c = OrderingCurve::parse(spec, radius);
        const std::string label = subject + " @ " + c.spec();
        if (wanted("decomposition"))
            guarded("decomposition", label, [&] { return verify_decomposition(t, c, o); });
        if (wanted("flag-identity"))
            guarded("flag-identity", label, [&] { return verify_flag_identity(t, c, o); });
        if (wanted("measure-laws"))
            guarded("measure-laws", label, [&] { return verify_measure_laws(t, c, o); });
        if (wanted("hs-flags"))
            guarded("hs-flags", label, [&] { return verify_hs_flags(t, c, o); });
        if (wanted("hs-hyperinvariance"))
            guarded("hs-hyperinvariance", label, [&] { return verify_hyperinvariance(t, c, o); });
        if (wanted("convergence"))
            guarded("convergence", label, [&] { return verify_convergence(t, c, o); });
        if (wanted("block-expectation"))
            guarded("block-expectation", label, [&] { return verify_block_expectation(t, c, o); });
    }
    if (wanted("hs-monotonicity"))
        guarded("hs-monotonicity", subject, [&] { return verify_hs_monotonicity(t, o); });
    if (wanted("block-split"))
        guarded("block-split", subject, [&] { return verify_block_splits(t, o); });
    if (wanted("brown-density"))
        guarded("brown-density", subject, [&] { return verify_brown_density(t, o); });
    if (wanted("ordering-witness"))
        guarded("ordering-witness", "[[1,1],[0,2]]", [&] { return verify_ordering_witness(o); });
    sort_reports(out);
    return out;
}

}  // namespace sporder
