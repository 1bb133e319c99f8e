#include "sporder/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "sporder/matrix_io.hpp"
#include "sporder/random.hpp"

namespace sporder {

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"ginibre", {}},
        {"elliptic", {"rho"}},
        {"jordan", {"lambda", "lambda_im"}},
        {"strict_upper", {}},
        {"normal_plus_nilpotent", {"nil"}},
        {"diag_perturb", {"eps", "levels", "pattern"}},
    };
    return keys;
}

double parse_number(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(d))
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("ensemble parameter " + key + " is not a number: " + v);
    }
}

}  // namespace

EnsembleSpec EnsembleSpec::parse(std::string_view text)
{
    EnsembleSpec s;
    const auto colon = text.find(':');
    s.kind = std::string(text.substr(0, colon));
    const auto it = allowed_keys().find(s.kind);
    if (it == allowed_keys().end())
        throw std::invalid_argument("unknown ensemble kind: " + s.kind);
    bool have_n = false;
    if (colon != std::string_view::npos) {
        std::string rest(text.substr(colon + 1));
        std::size_t start = 0;
        while (start <= rest.size()) {
            const auto comma = rest.find(',', start);
            const std::string item = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            start = comma == std::string::npos ? rest.size() + 1 : comma + 1;
            if (item.empty())
                continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("ensemble option needs key=value: " + item);
            const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
            if (key == "n") {
                const double v = parse_number(key, value);
                if (v < 1 || v != std::floor(v) || v > 4096)
                    throw std::invalid_argument("ensemble size n must be an integer in [1, 4096]");
                s.n = static_cast<int>(v);
                have_n = true;
            } else if (key == "seed") {
                try {
                    std::size_t used = 0;
                    s.seed = std::stoull(value, &used);
                    if (used != value.size() || value.find_first_not_of("0123456789") != std::string::npos)
                        throw std::invalid_argument(value);
                } catch (const std::exception&) {
                    throw std::invalid_argument("ensemble seed must be a nonnegative integer: " + value);
                }
            } else if (it->second.count(key)) {
                s.params[key] = value;
            } else {
                throw std::invalid_argument("ensemble " + s.kind + " has no parameter " + key);
            }
        }
    }
    if (!have_n)
        throw std::invalid_argument("ensemble spec needs n=<size>");
    return s;
}

std::string EnsembleSpec::to_string() const
{
    std::string s = kind + ":n=" + std::to_string(n) + ",seed=" + std::to_string(seed);
    for (const auto& [k, v] : params)
        s += "," + k + "=" + v;
    return s;
}

double EnsembleSpec::number(const std::string& key, double fallback) const
{
    const auto it = params.find(key);
    return it == params.end() ? fallback : parse_number(key, it->second);
}

std::string EnsembleSpec::text(const std::string& key, const std::string& fallback) const
{
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

namespace {

ComplexMatrix gue(Rng& rng, int n)
{
    const ComplexMatrix g = rng.complex_gaussian_matrix(n, n);
    return (g + g.adjoint()) / std::sqrt(2.0 * n);
}

ComplexMatrix haar_unitary(Rng& rng, int n)
{
    const ComplexMatrix g = rng.complex_gaussian_matrix(n, n);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const double mod = std::abs(r(j, j));
        if (mod > 0.0)
            q.col(j) *= r(j, j) / mod;
    }
    return q;
}

ComplexMatrix strict_upper_gaussian(Rng& rng, int n)
{
    ComplexMatrix s = ComplexMatrix::Zero(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            s(i, j) = rng.complex_gaussian() * scale;
    return s;
}

// Edge coordinates of the level-4 grid on the square of radius 2: -3 + 6k/16.
double edge_coordinate(Rng& rng)
{
    return -1.5 + 0.375 * static_cast<double>(rng.uniform_int(0, 8));
}

}  // namespace

ComplexMatrix sample(const EnsembleSpec& spec)
{
    if (spec.n < 1)
        throw std::invalid_argument("ensemble size must be >= 1");
    const int n = spec.n;
    Rng rng(spec.seed);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

    if (spec.kind == "ginibre")
        return rng.complex_gaussian_matrix(n, n) * inv_sqrt_n;

    if (spec.kind == "elliptic") {
        const double rho = spec.number("rho", 0.0);
        if (std::abs(rho) > 1.0)
            throw std::invalid_argument("elliptic ensemble needs |rho| <= 1");
        const ComplexMatrix h1 = gue(rng, n);
        const ComplexMatrix h2 = gue(rng, n);
        return std::sqrt((1.0 + rho) / 2.0) * h1 + Complex(0.0, std::sqrt((1.0 - rho) / 2.0)) * h2;
    }

    if (spec.kind == "jordan") {
        const Complex lambda(spec.number("lambda", 0.0), spec.number("lambda_im", 0.0));
        ComplexMatrix j = lambda * ComplexMatrix::Identity(n, n);
        for (int i = 0; i + 1 < n; ++i)
            j(i, i + 1) = 1.0;
        return j;
    }

    if (spec.kind == "strict_upper")
        return strict_upper_gaussian(rng, n);

    if (spec.kind == "normal_plus_nilpotent") {
        const double nil = spec.number("nil", 0.5);
        if (nil < 0.0)
            throw std::invalid_argument("normal_plus_nilpotent needs nil >= 0");
        const ComplexMatrix u = haar_unitary(rng, n);
        ComplexMatrix core = strict_upper_gaussian(rng, n) * nil;
        for (int i = 0; i < n; ++i)
            core(i, i) = rng.complex_gaussian();
        return u * core * u.adjoint();
    }

    if (spec.kind == "diag_perturb") {
        const double eps = spec.number("eps", 0.0);
        if (!(eps >= 0.0))
            throw std::invalid_argument("diag_perturb needs eps >= 0");
        const double levels_d = spec.number("levels", n);
        if (levels_d < 1 || levels_d != std::floor(levels_d))
            throw std::invalid_argument("diag_perturb needs an integer levels >= 1");
        const int levels = static_cast<int>(std::min<double>(levels_d, n));
        const std::string pattern = spec.text("pattern", "random");
        std::vector<Complex> values;
        if (pattern == "random") {
            for (int i = 0; i < levels; ++i)
                values.push_back(rng.complex_gaussian());
        } else if (pattern == "edges") {
            values.push_back(2.0);
            while (static_cast<int>(values.size()) < levels) {
                const Complex v(edge_coordinate(rng), edge_coordinate(rng));
                if (std::abs(v) < 2.0 && std::find(values.begin(), values.end(), v) == values.end())
                    values.push_back(v);
            }
        } else {
            throw std::invalid_argument("diag_perturb pattern must be random or edges");
        }
        ComplexMatrix d = ComplexMatrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
            d(i, i) = values[static_cast<std::size_t>(i % levels)];
        if (eps > 0.0)
            d += eps * rng.complex_gaussian_matrix(n, n) * inv_sqrt_n;
        return d;
    }

    throw std::invalid_argument("unknown ensemble kind: " + spec.kind);
}

std::vector<EnsembleSpec> corpus()
{
    static const char* const specs[] = {
        "ginibre:n=2,seed=1",
        "ginibre:n=3,seed=2",
        "ginibre:n=4,seed=3",
        "ginibre:n=5,seed=4",
        "ginibre:n=6,seed=7",
        "ginibre:n=8,seed=5",
        "ginibre:n=12,seed=6",
        "ginibre:n=16,seed=7",
        "ginibre:n=24,seed=8",
        "ginibre:n=32,seed=7",
        "ginibre:n=48,seed=9",
        "ginibre:n=64,seed=7",
        "elliptic:n=8,seed=11,rho=0.5",
        "elliptic:n=16,seed=12,rho=0.5",
        "elliptic:n=32,seed=13,rho=-0.3",
        "elliptic:n=10,seed=14,rho=1",
        "elliptic:n=10,seed=15,rho=-1",
        "elliptic:n=20,seed=16,rho=0",
        "jordan:n=4,seed=0,lambda=2",
        "jordan:n=3,seed=0,lambda=0",
        "jordan:n=6,seed=0,lambda=0.5,lambda_im=0.5",
        "jordan:n=2,seed=0,lambda=-1",
        "strict_upper:n=2,seed=21",
        "strict_upper:n=5,seed=22",
        "strict_upper:n=8,seed=23",
        "strict_upper:n=16,seed=24",
        "normal_plus_nilpotent:n=4,seed=31",
        "normal_plus_nilpotent:n=8,seed=32",
        "normal_plus_nilpotent:n=16,seed=33,nil=0.25",
        "normal_plus_nilpotent:n=32,seed=34",
        "normal_plus_nilpotent:n=64,seed=35,nil=0.1",
        "diag_perturb:n=8,seed=41,eps=0.001,levels=8,pattern=random",
        "diag_perturb:n=8,seed=42,eps=0,levels=4,pattern=random",
        "diag_perturb:n=20,seed=43,eps=1e-06,levels=5,pattern=random",
        "diag_perturb:n=9,seed=44,eps=0,levels=9,pattern=edges",
        "diag_perturb:n=12,seed=45,eps=1e-12,levels=4,pattern=edges",
        "diag_perturb:n=16,seed=46,eps=1e-12,levels=8,pattern=edges",
        "diag_perturb:n=24,seed=47,eps=0,levels=6,pattern=edges",
        "ginibre:n=10,seed=51",
        "ginibre:n=20,seed=52",
    };
    std::vector<EnsembleSpec> out;
    for (const char* s : specs)
        out.push_back(EnsembleSpec::parse(s));
    return out;
}

std::string matrix_digest(const ComplexMatrix& m)
{
    return fnv1a_hex(matrix_to_string(m));
}

}  // namespace sporder
