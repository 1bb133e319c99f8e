#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sporder/brown.hpp"
#include "sporder/curve.hpp"
#include "sporder/ensembles.hpp"
#include "sporder/matrix_io.hpp"
#include "sporder/projection.hpp"
#include "sporder/region.hpp"
#include "sporder/spectral.hpp"
#include "sporder/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sporder;

namespace {

constexpr int kPass = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct RunConfig {
    std::string command;
    std::string matrix;    // absolute path, empty when an ensemble is used
    std::string ensemble;  // canonical spec string
    std::vector<std::string> curves;
    std::vector<std::string> regions;
    std::vector<std::string> checks;
    std::vector<std::string> points;  // "re,im" for curve comparisons
    int level = 3;
    int grid = 256;
    std::string out;
    VerifyOptions verify;
};

json config_to_json(const RunConfig& c)
{
    const VerifyOptions& v = c.verify;
    return json{
        {"command", c.command},
        {"matrix", c.matrix.empty() ? json(nullptr) : json(c.matrix)},
        {"ensemble", c.ensemble.empty() ? json(nullptr) : json(c.ensemble)},
        {"curves", c.curves},
        {"regions", c.regions},
        {"checks", c.checks},
        {"points", c.points},
        {"level", c.level},
        {"grid", c.grid},
        {"out", c.out},
        {"seed", v.seed},
        {"tolerances",
         {{"structural", v.tol_structural},
          {"det", v.tol_det},
          {"shift_det", v.tol_shift_det},
          {"spectrum", v.tol_spectrum},
          {"backward", v.tol_backward},
          {"density", v.density_tol}}},
    };
}

RunConfig config_from_json(const json& j)
{
    RunConfig c;
    const auto text = [&](const char* key) { return j.at(key).is_null() ? std::string() : j.at(key).get<std::string>(); };
    c.command = j.at("command").get<std::string>();
    c.matrix = text("matrix");
    c.ensemble = text("ensemble");
    c.curves = j.at("curves").get<std::vector<std::string>>();
    c.regions = j.at("regions").get<std::vector<std::string>>();
    c.checks = j.at("checks").get<std::vector<std::string>>();
    c.points = j.at("points").get<std::vector<std::string>>();
    c.level = j.at("level").get<int>();
    c.grid = j.at("grid").get<int>();
    c.out = j.at("out").get<std::string>();
    c.verify.seed = j.at("seed").get<std::uint64_t>();
    const json& t = j.at("tolerances");
    c.verify.tol_structural = t.at("structural").get<double>();
    c.verify.tol_det = t.at("det").get<double>();
    c.verify.tol_shift_det = t.at("shift_det").get<double>();
    c.verify.tol_spectrum = t.at("spectrum").get<double>();
    c.verify.tol_backward = t.at("backward").get<double>();
    c.verify.density_tol = t.at("density").get<double>();
    c.verify.density_grid = c.grid;
    return c;
}

struct Subject {
    ComplexMatrix t;
    std::string label;
};

std::optional<Subject> load_subject(const RunConfig& c)
{
    if (!c.matrix.empty() && !c.ensemble.empty())
        throw std::invalid_argument("give either --matrix or --ensemble, not both");
    if (!c.matrix.empty()) {
        ComplexMatrix t = read_matrix(c.matrix);
        return Subject{t, "matrix:" + matrix_digest(t)};
    }
    if (!c.ensemble.empty()) {
        const EnsembleSpec spec = EnsembleSpec::parse(c.ensemble);
        return Subject{sample(spec), spec.to_string()};
    }
    return std::nullopt;
}

Subject require_subject(const RunConfig& c)
{
    auto s = load_subject(c);
    if (!s)
        throw std::invalid_argument(c.command + " needs --matrix or --ensemble");
    return *s;
}

std::string curve_or_default(const RunConfig& c)
{
    if (c.curves.size() > 1)
        throw std::invalid_argument(c.command + " takes a single --curve");
    return c.curves.empty() ? std::string("hilbert") : c.curves.front();
}

int exit_for(const std::vector<CheckReport>& reports)
{
    return count_verdict(reports, Verdict::Fail) > 0 ? kFailure : kPass;
}

void write_reports(const fs::path& out, const std::vector<CheckReport>& reports)
{
    write_text(out / "report.json", dump_json(reports_to_json(reports)) + "\n");
    for (const auto& r : reports)
        if (r.verdict != Verdict::Pass)
            std::cerr << to_string(r.verdict) << " " << r.id << " [" << r.subject << "] " << r.note << "\n";
    std::cout << reports.size() << " checks: " << count_verdict(reports, Verdict::Pass) << " pass, "
              << count_verdict(reports, Verdict::Fail) << " fail, " << count_verdict(reports, Verdict::Skip)
              << " skip\n";
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

int cmd_decompose(const RunConfig& c, const fs::path& out)
{
    const Subject s = require_subject(c);
    const OrderingCurve curve = OrderingCurve::parse(curve_or_default(c), curve_radius_for(s.t));
    const Decomposition d = decompose(s.t, curve);

    write_matrix(out / "T.json", s.t);
    write_matrix(out / "N.json", d.n);
    write_matrix(out / "Q.json", d.q);
    json clusters = json::array();
    for (std::size_t i = 0; i < d.table.cluster_count(); ++i)
        clusters.push_back({{"center", complex_json(d.table.centers[i])},
                            {"multiplicity", d.table.multiplicity(i)},
                            {"param", d.table.params[i].to_string()},
                            {"flag_rank", d.table.offsets[i + 1]}});
    const json table{{"curve", curve.spec()}, {"radius", d.table.radius}, {"clusters", clusters}};
    write_text(out / "table.json", dump_json(table) + "\n");

    const auto reports = run_checks(s.t, s.label, {curve.spec()}, c.verify,
                                    {"decomposition", "flag-identity", "hs-flags"});
    write_reports(out, reports);
    return exit_for(reports);
}

int cmd_brown(const RunConfig& c, const fs::path& out)
{
    const Subject s = require_subject(c);
    write_text(out / "atoms.csv", empirical_brown(s.t).to_csv());
    const double eps = 1e-3 * std::max(1.0, operator_norm(s.t));
    const DensityGrid g = brown_density_grid(s.t, c.grid, eps);
    write_text(out / "density.csv", g.to_csv());
    write_text(out / "density.pgm", g.to_pgm());
    const std::vector<CheckReport> reports{verify_brown_density(s.t, c.verify)};
    write_reports(out, reports);
    return exit_for(reports);
}

int cmd_project(const RunConfig& c, const fs::path& out)
{
    const Subject s = require_subject(c);
    if (c.regions.empty())
        throw std::invalid_argument("project needs --region");
    const SpectralAnalysis a = analyze(s.t);
    const double radius = a.norm > 0.0 ? a.norm : 1.0;
    const PointMeasure nu = empirical_brown(s.t);
    json summary = json::array();
    std::vector<CheckReport> reports;
    for (std::size_t i = 0; i < c.regions.size(); ++i) {
        const Region b = Region::parse(c.regions[i], radius);
        const Projection p = hs_projection(a, b);
        const std::string name = "P" + std::to_string(i) + ".json";
        write_matrix(out / name, p.matrix);
        summary.push_back({{"region", b.describe()}, {"file", name}, {"rank", p.rank}, {"trace", p.trace()}});

        CheckReport r;
        r.id = "projection";
        r.anchor = "tau(P) = nu_T(B); (1-P)TP = 0; P = P* = P^2";
        r.subject = s.label + " @ " + b.describe();
        r.digest = inputs_digest(s.t, b.describe(), c.verify.seed);
        r.tolerance = c.verify.tol_structural;
        r.add("trace_vs_measure", std::abs(p.trace() - region_mass(nu, b)), 1e-12);
        r.add("invariance_defect_rel", invariance_defect(s.t, p.matrix) / std::max(1.0, a.norm),
              c.verify.tol_structural);
        r.add("projection_defect", projection_defect(p.matrix), c.verify.tol_structural);
        r.finalize();
        reports.push_back(r);
    }
    write_text(out / "projections.json", dump_json(summary) + "\n");
    sort_reports(reports);
    write_reports(out, reports);
    return exit_for(reports);
}

Complex parse_point(const std::string& text)
{
    double re = 0.0, im = 0.0;
    char comma = 0;
    std::istringstream in(text);
    if (!(in >> re >> comma >> im) || comma != ',' || !(in >> std::ws).eof())
        throw std::invalid_argument("point must be re,im: " + text);
    return {re, im};
}

int cmd_curve(const RunConfig& c, const fs::path& out)
{
    const auto s = load_subject(c);
    const double radius = s ? curve_radius_for(s->t) : 1.0;
    const OrderingCurve curve = OrderingCurve::parse(curve_or_default(c), radius);
    if (c.level < 0 || c.level > 10)
        throw std::invalid_argument("curve tabulation level must be in 0..10");

    // tabulate eval at t = k / 4^level
    std::string csv = "t,re,im\n";
    const std::uint64_t count = std::uint64_t{1} << (2 * c.level);
    for (std::uint64_t k = 0; k < count; ++k) {
        const Dyadic t = Dyadic::from_index(k, 2 * c.level);
        const Complex z = curve.eval(t);
        csv += t.to_string() + "," + format_double(z.real()) + "," + format_double(z.imag()) + "\n";
    }
    write_text(out / "curve.csv", csv);

    json result{{"curve", curve.spec()}, {"radius", radius}};
    json points = json::array();
    for (const auto& p : c.points) {
        const Complex z = parse_point(p);
        points.push_back({{"point", complex_json(z)}, {"param", curve.min_preimage(z).to_string()}});
    }
    std::sort(points.begin(), points.end(),
              [](const json& x, const json& y) { return x["param"].get<std::string>() < y["param"].get<std::string>(); });
    result["points"] = points;

    CheckReport r;
    r.id = "curve-validate";
    r.anchor = "distinct minimal preimages for the spectral clusters";
    r.subject = (s ? s->label : std::string("points")) + " @ " + curve.spec();
    r.tolerance = 0.0;
    if (s) {
        r.digest = inputs_digest(s->t, curve.spec(), c.verify.seed);
        const auto eig = schur_form(s->t).diag_order();
        const CurveValidation v = curve_validate(curve, eig, clustering_threshold(operator_norm(s->t)));
        json spectrum = json::array();
        for (std::size_t i = 0; i < v.ordered_points.size(); ++i)
            spectrum.push_back({{"point", complex_json(v.ordered_points[i])}, {"param", v.ordered_params[i].to_string()}});
        result["spectrum"] = spectrum;
        r.add("problems", static_cast<double>(v.problems.size()), 0.0);
        for (const auto& p : v.problems)
            r.note += (r.note.empty() ? "" : "; ") + p;
        r.finalize();
    } else {
        r.digest = fnv1a_hex(curve.spec() + "|" + std::to_string(c.verify.seed));
        r.skip("no matrix given");
    }
    write_text(out / "curve.json", dump_json(result) + "\n");
    const std::vector<CheckReport> reports{r};
    write_reports(out, reports);
    return exit_for(reports);
}

int cmd_verify(const RunConfig& c, const fs::path& out)
{
    std::set<std::string> only(c.checks.begin(), c.checks.end());
    for (const auto& id : only)
        if (!is_check_id(id))
            throw std::invalid_argument("unknown check id: " + id);
    std::vector<std::string> curves = c.curves;
    if (curves.empty())
        curves = {"hilbert", "morton", "lex"};

    std::vector<CheckReport> reports;
    if (const auto s = load_subject(c)) {
        reports = run_checks(s->t, s->label, curves, c.verify, only);
    } else {
        // corpus mode: the once-per-run checks are split out of the per-matrix filter
        const bool all = only.empty();
        const bool density = all || only.erase("brown-density") > 0;
        const bool witness = all || only.erase("ordering-witness") > 0;
        const bool per_matrix = all || !only.empty();
        if (per_matrix)
            for (const auto& spec : corpus()) {
                auto part = run_checks(sample(spec), spec.to_string(), curves, c.verify, only);
                reports.insert(reports.end(), part.begin(), part.end());
            }
        if (density) {
            const EnsembleSpec spec = EnsembleSpec::parse("ginibre:n=64,seed=7");
            auto part = run_checks(sample(spec), spec.to_string(), {}, c.verify, {"brown-density"});
            reports.insert(reports.end(), part.begin(), part.end());
        }
        if (witness) {
            ComplexMatrix t(2, 2);
            t << 1.0, 1.0, 0.0, 2.0;
            auto part = run_checks(t, "witness", {}, c.verify, {"ordering-witness"});
            reports.insert(reports.end(), part.begin(), part.end());
        }
        sort_reports(reports);
    }
    write_reports(out, reports);
    return exit_for(reports);
}

int run(const RunConfig& c)
{
    if (c.out.empty())
        throw std::invalid_argument("--out is required");
    const fs::path out(c.out);
    fs::create_directories(out);
    write_text(out / "config.json", dump_json(config_to_json(c)) + "\n");
    if (c.command == "decompose")
        return cmd_decompose(c, out);
    if (c.command == "brown")
        return cmd_brown(c, out);
    if (c.command == "project")
        return cmd_project(c, out);
    if (c.command == "curve")
        return cmd_curve(c, out);
    if (c.command == "verify")
        return cmd_verify(c, out);
    throw std::invalid_argument("unknown command: " + c.command);
}

std::string absolute_or_empty(const std::string& p)
{
    return p.empty() ? p : fs::absolute(p).lexically_normal().string();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spectral orderings, Brown measures and normal-plus-quasinilpotent decompositions of matrices"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string replay_path, replay_out;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--matrix", cfg.matrix, "matrix JSON file {n, entries: [[re, im], ...]}");
        sub->add_option("--ensemble", cfg.ensemble, "ensemble spec, e.g. ginibre:n=32,seed=7");
        sub->add_option("--out", cfg.out, "output directory")->required();
        sub->add_option("--seed", cfg.verify.seed, "random seed for the checks");
        sub->add_option("--tol-structural", cfg.verify.tol_structural);
        sub->add_option("--tol-det", cfg.verify.tol_det);
        sub->add_option("--tol-shift-det", cfg.verify.tol_shift_det);
        sub->add_option("--tol-spectrum", cfg.verify.tol_spectrum);
        sub->add_option("--tol-backward", cfg.verify.tol_backward);
        sub->add_option("--tol-density", cfg.verify.density_tol);
    };

    auto* decompose_cmd = app.add_subcommand("decompose", "write T, N, Q, the spectral table and embedded checks");
    common(decompose_cmd);
    decompose_cmd->add_option("--curve", cfg.curves, "ordering curve spec (default hilbert)");

    auto* brown_cmd = app.add_subcommand("brown", "atoms, density grid and heatmap of the Brown measure");
    common(brown_cmd);
    brown_cmd->add_option("--grid", cfg.grid, "density grid resolution")->check(CLI::Range(16, 4096));

    auto* project_cmd = app.add_subcommand("project", "invariant-subspace projections onto regions");
    common(project_cmd);
    project_cmd->add_option("--region", cfg.regions, "region spec, repeatable")->required();

    auto* curve_cmd = app.add_subcommand("curve", "tabulate a curve and order points or a spectrum along it");
    common(curve_cmd);
    curve_cmd->add_option("--curve", cfg.curves, "ordering curve spec (default hilbert)");
    curve_cmd->add_option("--level", cfg.level, "tabulate at t = k / 4^level");
    curve_cmd->add_option("--point", cfg.points, "point re,im to place on the curve, repeatable");

    auto* verify_cmd = app.add_subcommand("verify", "run checks on one matrix, or on the corpus when none is given");
    common(verify_cmd);
    verify_cmd->add_option("--curve", cfg.curves, "curve specs (default hilbert, morton, lex)");
    verify_cmd->add_option("--check", cfg.checks, "run only these check ids");
    verify_cmd->add_option("--grid", cfg.grid, "density grid resolution")->check(CLI::Range(16, 4096));

    auto* replay_cmd = app.add_subcommand("replay", "rerun a config.json");
    replay_cmd->add_option("config", replay_path, "config.json of an earlier run")->required();
    replay_cmd->add_option("--out", replay_out, "output directory (default: the recorded one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (replay_cmd->parsed()) {
            cfg = config_from_json(json::parse(read_text(replay_path)));
            if (!replay_out.empty())
                cfg.out = absolute_or_empty(replay_out);
        } else {
            cfg.command = app.get_subcommands().front()->get_name();
            cfg.verify.density_grid = cfg.grid;
            cfg.matrix = absolute_or_empty(cfg.matrix);
            cfg.out = absolute_or_empty(cfg.out);
            if (!cfg.ensemble.empty())
                cfg.ensemble = EnsembleSpec::parse(cfg.ensemble).to_string();
        }
        return run(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kUsage;
    } catch (const RegionAmbiguity& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
