#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace sporder {

enum class Verdict { Pass, Fail, Skip };
enum class Relation { Le, Ge };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct Measurement {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    Relation relation = Relation::Le;

    /// NaN never satisfies a bound.
    bool ok() const;
};

/// One verification result. The verdict is Pass iff every measurement is
/// within its bound, unless the check was skipped.
struct CheckReport {
    std::string id;
    std::string anchor;   // the identity being checked, as a formula
    std::string subject;  // input description (ensemble spec, file, curve)
    std::string digest;   // digest of the inputs
    std::vector<Measurement> measurements;
    double tolerance = 0.0;
    Verdict verdict = Verdict::Pass;
    std::string note;

    void add(const std::string& name, double value, double bound, Relation rel = Relation::Le);
    /// Sets the verdict from the measurements; keeps Skip.
    void finalize();
    void skip(const std::string& why);
    bool failed() const { return verdict == Verdict::Fail; }

    nlohmann::json to_json() const;
    static CheckReport from_json(const nlohmann::json& j);
};

/// Stable sort by (id, subject).
void sort_reports(std::vector<CheckReport>& reports);

nlohmann::json reports_to_json(const std::vector<CheckReport>& reports);
std::vector<CheckReport> reports_from_json(const nlohmann::json& j);

int count_verdict(const std::vector<CheckReport>& reports, Verdict v);

}  // namespace sporder
