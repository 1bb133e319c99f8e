#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const char* cli() { return SPORDER_CLI; }

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("sporder_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args)
{
    const std::string cmd = std::string(cli()) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// row-major complex entries
void write_matrix(const fs::path& p, int n, const std::vector<std::pair<double, double>>& entries)
{
    nlohmann::json j{{"n", n}, {"entries", nlohmann::json::array()}};
    for (const auto& [re, im] : entries)
        j["entries"].push_back({re, im});
    std::ofstream(p) << j.dump();
}

std::pair<double, double> entry(const nlohmann::json& m, int i, int j)
{
    const int n = m.at("n").get<int>();
    const auto& e = m.at("entries").at(static_cast<std::size_t>(i * n + j));
    return {e.at(0).get<double>(), e.at(1).get<double>()};
}

int csv_rows(const fs::path& p)
{
    std::istringstream in(slurp(p));
    std::string line;
    int rows = -1;  // header
    while (std::getline(in, line))
        if (!line.empty())
            ++rows;
    return rows;
}

}  // namespace

TEST(Cli, NoSubcommand) { EXPECT_EQ(run(""), 2); }

TEST(Cli, DecomposeJordan)
{
    const fs::path out = scratch("jordan");
    ASSERT_EQ(run("decompose --ensemble jordan:n=4,seed=0,lambda=2 --out " + out.string()), 0);
    const auto n = load(out / "N.json");
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const auto [re, im] = entry(n, i, j);
            EXPECT_NEAR(re, i == j ? 2.0 : 0.0, 1e-12);
            EXPECT_NEAR(im, 0.0, 1e-12);
        }
    const auto report = load(out / "report.json");
    for (const auto& r : report)
        EXPECT_EQ(r.at("verdict"), "pass") << r.dump();
    EXPECT_TRUE(fs::exists(out / "Q.json"));
    EXPECT_TRUE(fs::exists(out / "table.json"));
    EXPECT_TRUE(fs::exists(out / "config.json"));
}

TEST(Cli, DecomposeOrderDependence)
{
    const fs::path dir = scratch("witness");
    write_matrix(dir / "t.json", 2, {{1, 0}, {1, 0}, {0, 0}, {2, 0}});
    const std::string m = "--matrix " + (dir / "t.json").string();
    ASSERT_EQ(run("decompose " + m + " --curve lex --out " + (dir / "a").string()), 0);
    ASSERT_EQ(run("decompose " + m + " --curve lex:mirror --out " + (dir / "b").string()), 0);
    const auto na = load(dir / "a" / "N.json");
    const auto nb = load(dir / "b" / "N.json");
    // lex puts 1 first: N = diag(1, 2)
    EXPECT_NEAR(entry(na, 0, 0).first, 1.0, 1e-12);
    EXPECT_NEAR(entry(na, 1, 1).first, 2.0, 1e-12);
    EXPECT_NEAR(std::abs(entry(na, 0, 1).first), 0.0, 1e-12);
    // mirrored lex puts 2 first
    EXPECT_NEAR(entry(nb, 0, 0).first, 1.5, 1e-12);
    EXPECT_NEAR(entry(nb, 0, 1).first, 0.5, 1e-12);
    EXPECT_NEAR(entry(nb, 1, 0).first, 0.5, 1e-12);
    EXPECT_NEAR(entry(nb, 1, 1).first, 1.5, 1e-12);
}

TEST(Cli, NonFiniteMatrixRejected)
{
    const fs::path dir = scratch("nan");
    std::ofstream(dir / "t.json") << R"({"n": 1, "entries": [["nan", 0]]})";
    EXPECT_EQ(run("decompose --matrix " + (dir / "t.json").string() + " --out " + (dir / "o").string()), 2);
    std::ofstream(dir / "bad.json") << R"({"n": 2, "entries": [[1, 0]]})";
    EXPECT_EQ(run("decompose --matrix " + (dir / "bad.json").string() + " --out " + (dir / "o").string()), 2);
}

TEST(Cli, UnknownCheck)
{
    const fs::path out = scratch("unknown");
    EXPECT_EQ(run("verify --ensemble ginibre:n=3,seed=1 --check nonsense --out " + out.string()), 2);
}

TEST(Cli, CheckFilter)
{
    const fs::path out = scratch("filter");
    ASSERT_EQ(run("verify --ensemble ginibre:n=5,seed=2 --check decomposition --check block-split --out " +
                  out.string()),
              0);
    const auto report = load(out / "report.json");
    ASSERT_EQ(report.size(), 4u);  // three curves plus one curve-free check
    for (const auto& r : report) {
        const auto id = r.at("id").get<std::string>();
        EXPECT_TRUE(id == "decomposition" || id == "block-split") << id;
        EXPECT_EQ(r.at("verdict"), "pass");
    }
}

TEST(Cli, BrownRootsOfUnity)
{
    const fs::path dir = scratch("roots");
    std::vector<std::pair<double, double>> e(64, {0.0, 0.0});
    for (int k = 0; k < 8; ++k)
        e[static_cast<std::size_t>(k * 8 + k)] = {std::cos(k * std::numbers::pi / 4), std::sin(k * std::numbers::pi / 4)};
    write_matrix(dir / "t.json", 8, e);
    const int code = run("brown --matrix " + (dir / "t.json").string() + " --grid 64 --out " + (dir / "o").string());
    EXPECT_TRUE(code == 0 || code == 1) << code;
    EXPECT_EQ(csv_rows(dir / "o" / "atoms.csv"), 8);
    EXPECT_TRUE(fs::exists(dir / "o" / "density.pgm"));
    EXPECT_EQ(csv_rows(dir / "o" / "density.csv"), 63);  // no header: 64 lines
}

TEST(Cli, BrownScalar)
{
    const fs::path dir = scratch("scalar");
    write_matrix(dir / "t.json", 1, {{0.25, -0.5}});
    const int code = run("brown --matrix " + (dir / "t.json").string() + " --grid 32 --out " + (dir / "o").string());
    EXPECT_TRUE(code == 0 || code == 1) << code;
    EXPECT_EQ(slurp(dir / "o" / "atoms.csv"), "re,im,weight\n0.25,-0.5,1\n");
}

TEST(Cli, ReplayIsByteIdentical)
{
    const fs::path dir = scratch("replay");
    ASSERT_EQ(run("verify --ensemble normal_plus_nilpotent:n=6,seed=3 --seed 11 --out " + (dir / "a").string()), 0);
    ASSERT_EQ(run("replay " + (dir / "a" / "config.json").string() + " --out " + (dir / "b").string()), 0);
    EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
    EXPECT_FALSE(slurp(dir / "a" / "report.json").empty());
}
