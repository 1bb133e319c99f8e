#include "sporder/matrix_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sporder {

using nlohmann::json;

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void escape_into(const std::string& s, std::string& out)
{
    // nlohmann already knows how to escape; reuse it for strings only.
    out += json(s).dump();
}

void dump_into(const json& j, std::string& out, int indent, int level)
{
    const auto newline = [&](int lvl) {
        if (indent < 0)
            return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * lvl), ' ');
    };
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                out += ',';
            first = false;
            newline(level + 1);
            escape_into(it.key(), out);
            out += indent < 0 ? ":" : ": ";
            dump_into(it.value(), out, indent, level + 1);
        }
        newline(level);
        out += '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // arrays of scalars stay on one line
        const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first)
                out += flat || indent < 0 ? ", " : ",";
            first = false;
            if (!flat)
                newline(level + 1);
            dump_into(e, out, indent, level + 1);
        }
        if (!flat)
            newline(level);
        out += ']';
        return;
    }
    case json::value_t::number_float:
        out += format_double(j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

}  // namespace

std::string dump_json(const json& j, int indent)
{
    std::string out;
    dump_into(j, out, indent, 0);
    return out;
}

json matrix_to_json(const ComplexMatrix& m)
{
    require_valid(m);
    json entries = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            entries.push_back(json::array({m(i, k).real(), m(i, k).imag()}));
    return json{{"n", m.rows()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("n") || !j.contains("entries"))
        throw std::invalid_argument("matrix JSON must be an object with \"n\" and \"entries\"");
    if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1)
        throw std::invalid_argument("matrix JSON: \"n\" must be a positive integer");
    const auto n = static_cast<Eigen::Index>(j["n"].get<long long>());
    const json& entries = j["entries"];
    if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != n * n)
        throw std::invalid_argument("matrix JSON: \"entries\" must hold n*n pairs");
    ComplexMatrix m(n, n);
    for (Eigen::Index idx = 0; idx < n * n; ++idx) {
        const json& e = entries[static_cast<std::size_t>(idx)];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw std::invalid_argument("matrix JSON: entry " + std::to_string(idx) +
                                        " is not a [re, im] pair of numbers");
        m(idx / n, idx % n) = Complex(e[0].get<double>(), e[1].get<double>());
    }
    require_valid(m);
    return m;
}

std::string matrix_to_string(const ComplexMatrix& m)
{
    return dump_json(matrix_to_json(m), -1) + "\n";
}

ComplexMatrix matrix_from_string(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("matrix JSON parse error: ") + e.what());
    }
    return matrix_from_json(j);
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::invalid_argument("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_matrix(const std::filesystem::path& path, const ComplexMatrix& m)
{
    write_text(path, matrix_to_string(m));
}

ComplexMatrix read_matrix(const std::filesystem::path& path)
{
    return matrix_from_string(read_text(path));
}

std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sporder
