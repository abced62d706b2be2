#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kplane {

inline constexpr const char* kReportSchema = "kplane-report/1";

// One tolerance check. `criterion` is the acceptance ID (AC1..AC10); the
// check passes when `value relation tolerance` holds, relation being one of
// "<=", ">=", "<", ">".
struct Check {
    std::string criterion;
    std::string name;
    double value = 0;
    std::string relation = "<=";
    double tolerance = 0;
    bool passed = false;
    friend bool operator==(const Check&, const Check&);
};

// Numeric table; column names follow the record types of the producing
// module (PicardRecord, SequenceRecord, ...).
struct ResultTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    friend bool operator==(const ResultTable&, const ResultTable&);
};

struct Artifact {
    std::string name;
    std::string path;
    std::string hash;  // content_hash of the snapshot bytes
    friend bool operator==(const Artifact&, const Artifact&) = default;
};

struct Report {
    std::string schema = kReportSchema;
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::pair<std::string, double>> constants;
    std::vector<ResultTable> tables;
    std::vector<Check> checks;
    std::vector<Artifact> artifacts;
    double wall_time = 0;  // seconds

    bool all_passed() const;
    // Appends a check, evaluating `passed`; throws UsageError on an unknown relation.
    const Check& check(const std::string& criterion, const std::string& name, double value,
                       const std::string& relation, double tolerance);
    ResultTable& table(const std::string& name, std::vector<std::string> columns);
    friend bool operator==(const Report&, const Report&);
};

enum class ReportFormat { json, csv };

std::string to_json(const Report& r);
Report parse_json(const std::string& text);

std::string to_csv(const ResultTable& t);
ResultTable parse_csv(const std::string& name, const std::string& text);
std::string checks_csv(const Report& r);

// Writes <dir>/<experiment>.json, or one <dir>/<experiment>.<table>.csv per
// table plus <dir>/<experiment>.checks.csv. Returns the paths written;
// throws IoError when the directory or a file cannot be written.
std::vector<std::string> emit(const Report& r, ReportFormat format, const std::string& dir);

}  // namespace kplane
