#include "kplane/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kplane/errors.hpp"

namespace kplane {

namespace {

using nlohmann::ordered_json;

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

ordered_json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double from_num(const ordered_json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    throw Error("report: bad numeric value '" + s + "'");
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_cell(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    double x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error("csv: bad cell '" + s + "'");
    return x;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    out.close();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

bool operator==(const Check& a, const Check& b) {
    return a.criterion == b.criterion && a.name == b.name && same(a.value, b.value) && a.relation == b.relation &&
           same(a.tolerance, b.tolerance) && a.passed == b.passed;
}

bool operator==(const ResultTable& a, const ResultTable& b) {
    if (a.name != b.name || a.columns != b.columns || a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i].size() != b.rows[i].size()) return false;
        for (std::size_t j = 0; j < a.rows[i].size(); ++j)
            if (!same(a.rows[i][j], b.rows[i][j])) return false;
    }
    return true;
}

bool operator==(const Report& a, const Report& b) {
    if (a.constants.size() != b.constants.size()) return false;
    for (std::size_t i = 0; i < a.constants.size(); ++i)
        if (a.constants[i].first != b.constants[i].first || !same(a.constants[i].second, b.constants[i].second))
            return false;
    return a.schema == b.schema && a.experiment == b.experiment && a.config == b.config && a.tables == b.tables &&
           a.checks == b.checks && a.artifacts == b.artifacts && same(a.wall_time, b.wall_time);
}

bool Report::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

const Check& Report::check(const std::string& criterion, const std::string& name, double value,
                           const std::string& relation, double tolerance) {
    bool ok = false;
    if (relation == "<=")
        ok = value <= tolerance;
    else if (relation == ">=")
        ok = value >= tolerance;
    else if (relation == "<")
        ok = value < tolerance;
    else if (relation == ">")
        ok = value > tolerance;
    else
        throw UsageError("unknown check relation '" + relation + "'");
    checks.push_back({criterion, name, value, relation, tolerance, ok});
    return checks.back();
}

ResultTable& Report::table(const std::string& name, std::vector<std::string> columns) {
    tables.push_back({name, std::move(columns), {}});
    return tables.back();
}

std::string to_json(const Report& r) {
    ordered_json j;
    j["schema"] = r.schema;
    j["experiment"] = r.experiment;
    ordered_json cfg = ordered_json::object();
    for (const auto& [k, v] : r.config) cfg[k] = v;
    j["config"] = cfg;
    ordered_json consts = ordered_json::array();
    for (const auto& [k, v] : r.constants) consts.push_back({{"name", k}, {"value", num(v)}});
    j["constants"] = consts;
    ordered_json tables = ordered_json::array();
    for (const auto& t : r.tables) {
        ordered_json rows = ordered_json::array();
        for (const auto& row : t.rows) {
            ordered_json jr = ordered_json::array();
            for (double x : row) jr.push_back(num(x));
            rows.push_back(jr);
        }
        tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
    }
    j["tables"] = tables;
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"criterion", c.criterion},
                          {"name", c.name},
                          {"value", num(c.value)},
                          {"relation", c.relation},
                          {"tolerance", num(c.tolerance)},
                          {"passed", c.passed}});
    j["checks"] = checks;
    ordered_json arts = ordered_json::array();
    for (const auto& a : r.artifacts) arts.push_back({{"name", a.name}, {"path", a.path}, {"hash", a.hash}});
    j["artifacts"] = arts;
    j["wall_time"] = num(r.wall_time);
    j["all_passed"] = r.all_passed();
    return j.dump(2) + "\n";
}

Report parse_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& ex) {
        throw Error(std::string("report: malformed JSON: ") + ex.what());
    }
    Report r;
    r.schema = j.at("schema").get<std::string>();
    if (r.schema != kReportSchema) throw Error("report: unsupported schema '" + r.schema + "'");
    r.experiment = j.at("experiment").get<std::string>();
    for (const auto& [k, v] : j.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    for (const auto& c : j.at("constants")) r.constants.emplace_back(c.at("name").get<std::string>(), from_num(c.at("value")));
    for (const auto& t : j.at("tables")) {
        ResultTable tab{t.at("name").get<std::string>(), t.at("columns").get<std::vector<std::string>>(), {}};
        for (const auto& row : t.at("rows")) {
            std::vector<double> vals;
            for (const auto& x : row) vals.push_back(from_num(x));
            tab.rows.push_back(std::move(vals));
        }
        r.tables.push_back(std::move(tab));
    }
    for (const auto& c : j.at("checks"))
        r.checks.push_back({c.at("criterion").get<std::string>(), c.at("name").get<std::string>(),
                            from_num(c.at("value")), c.at("relation").get<std::string>(),
                            from_num(c.at("tolerance")), c.at("passed").get<bool>()});
    for (const auto& a : j.at("artifacts"))
        r.artifacts.push_back(
            {a.at("name").get<std::string>(), a.at("path").get<std::string>(), a.at("hash").get<std::string>()});
    r.wall_time = from_num(j.at("wall_time"));
    return r;
}

std::string to_csv(const ResultTable& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + fmt(row[i]);
        out += "\n";
    }
    return out;
}

ResultTable parse_csv(const std::string& name, const std::string& text) {
    ResultTable t{name, {}, {}};
    std::stringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("csv: missing header");
    if (!line.empty()) t.columns = split(line, ',');
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != t.columns.size()) throw Error("csv: row width does not match header");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_cell(c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string checks_csv(const Report& r) {
    std::string out = "criterion,name,value,relation,tolerance,passed\n";
    for (const auto& c : r.checks)
        out += c.criterion + "," + c.name + "," + fmt(c.value) + "," + c.relation + "," + fmt(c.tolerance) + "," +
               (c.passed ? "true" : "false") + "\n";
    return out;
}

std::vector<std::string> emit(const Report& r, ReportFormat format, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
    const std::string stem = r.experiment.empty() ? "report" : r.experiment;
    std::vector<std::string> paths;
    if (format == ReportFormat::json) {
        fs::path p = fs::path(dir) / (stem + ".json");
        write_file(p, to_json(r));
        paths.push_back(p.string());
        return paths;
    }
    for (const auto& t : r.tables) {
        fs::path p = fs::path(dir) / (stem + "." + t.name + ".csv");
        write_file(p, to_csv(t));
        paths.push_back(p.string());
    }
    fs::path p = fs::path(dir) / (stem + ".checks.csv");
    write_file(p, checks_csv(r));
    paths.push_back(p.string());
    return paths;
}

}  // namespace kplane
