#include "sporder/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sporder {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Skip: return "skip";
    }
    return "?";
}

Verdict verdict_from_string(const std::string& s)
{
    if (s == "pass")
        return Verdict::Pass;
    if (s == "fail")
        return Verdict::Fail;
    if (s == "skip")
        return Verdict::Skip;
    throw std::invalid_argument("unknown verdict: " + s);
}

bool Measurement::ok() const
{
    if (std::isnan(value) || std::isnan(bound))
        return false;
    return relation == Relation::Le ? value <= bound : value >= bound;
}

void CheckReport::add(const std::string& name, double value, double bound, Relation rel)
{
    measurements.push_back({name, value, bound, rel});
}

void CheckReport::finalize()
{
    if (verdict == Verdict::Skip)
        return;
    verdict = std::all_of(measurements.begin(), measurements.end(), [](const Measurement& m) { return m.ok(); })
                  ? Verdict::Pass
                  : Verdict::Fail;
}

void CheckReport::skip(const std::string& why)
{
    verdict = Verdict::Skip;
    note = why;
}

namespace {

// JSON has no infinities or NaN; those travel as strings.
nlohmann::json number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

double number_from(const nlohmann::json& j)
{
    if (j.is_number())
        return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("not a number: " + s);
}

}  // namespace

nlohmann::json CheckReport::to_json() const
{
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : measurements)
        ms.push_back({{"name", m.name},
                      {"value", number(m.value)},
                      {"bound", number(m.bound)},
                      {"relation", m.relation == Relation::Le ? "le" : "ge"}});
    return {{"id", id},           {"anchor", anchor},       {"subject", subject},
            {"digest", digest},   {"measurements", ms},     {"tolerance", number(tolerance)},
            {"verdict", to_string(verdict)}, {"note", note}};
}

CheckReport CheckReport::from_json(const nlohmann::json& j)
{
    CheckReport r;
    r.id = j.at("id").get<std::string>();
    r.anchor = j.at("anchor").get<std::string>();
    r.subject = j.at("subject").get<std::string>();
    r.digest = j.at("digest").get<std::string>();
    for (const auto& m : j.at("measurements")) {
        const auto rel = m.at("relation").get<std::string>();
        if (rel != "le" && rel != "ge")
            throw std::invalid_argument("unknown relation: " + rel);
        r.measurements.push_back({m.at("name").get<std::string>(), number_from(m.at("value")),
                                  number_from(m.at("bound")), rel == "le" ? Relation::Le : Relation::Ge});
    }
    r.tolerance = number_from(j.at("tolerance"));
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.note = j.at("note").get<std::string>();
    return r;
}

void sort_reports(std::vector<CheckReport>& reports)
{
    std::stable_sort(reports.begin(), reports.end(), [](const CheckReport& a, const CheckReport& b) {
        return a.id != b.id ? a.id < b.id : a.subject < b.subject;
    });
}

nlohmann::json reports_to_json(const std::vector<CheckReport>& reports)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports)
        arr.push_back(r.to_json());
    return arr;
}

std::vector<CheckReport> reports_from_json(const nlohmann::json& j)
{
    if (!j.is_array())
        throw std::invalid_argument("report file must hold a JSON array");
    std::vector<CheckReport> out;
    for (const auto& r : j)
        out.push_back(CheckReport::from_json(r));
    return out;
}

int count_verdict(const std::vector<CheckReport>& reports, Verdict v)
{
    return static_cast<int>(std::count_if(reports.begin(), reports.end(), [&](const auto& r) { return r.verdict == v; }));
}

}  // namespace sporder
