#include "kplane/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "kplane/errors.hpp"

namespace kplane {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> items;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) items.push_back(trim(item));
    return items;
}

std::string fmt_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_floating_point_v<T>)
            out += fmt_double(xs[i]);
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x))
        throw UsageError("config key '" + key + "': expected a number, got '" + v + "'");
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    long long x = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw UsageError("config key '" + key + "': expected an integer, got '" + v + "'");
    return x;
}

Rational to_rational(const std::string& key, const std::string& v) {
    try {
        return Rational::parse(v);
    } catch (const std::exception& ex) {
        throw UsageError("config key '" + key + "': expected a rational, got '" + v + "' (" + ex.what() + ")");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw UsageError("config key '" + key + "': expected true or false, got '" + v + "'");
}

using Setter = void (*)(ExperimentConfig&, const std::string&, const std::string&);

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"experiment", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.experiment = v; }},
        {"n", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.n = int(to_int(k, v)); }},
        {"k", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.k = int(to_int(k, v)); }},
        {"q0", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.q0 = to_rational(k, v); }},
        {"N", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.N = int(to_int(k, v)); }},
        {"L", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.L = to_double(k, v); }},
        {"scheme", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.scheme = parse_scheme(v); }},
        {"count", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.count = int(to_int(k, v)); }},
        {"s", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.s = to_double(k, v); }},
        {"Lambda",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.Lambda.clear();
             for (auto& item : split_list(v)) c.Lambda.push_back(to_double(k, item));
         }},
        {"t", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.t = to_rational(k, v); }},
        {"eps",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.eps.clear();
             for (auto& item : split_list(v)) c.eps.push_back(to_double(k, item));
         }},
        {"iters", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.iters = int(to_int(k, v)); }},
        {"seed",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             long long x = to_int(k, v);
             if (x < 0) throw UsageError("config key 'seed' must be nonnegative");
             c.seed = static_cast<std::uint64_t>(x);
         }},
        {"grid_sizes",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.grid_sizes.clear();
             for (auto& item : split_list(v)) c.grid_sizes.push_back(int(to_int(k, item)));
         }},
        {"refine", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.refine = v; }},
        {"trials", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trials = int(to_int(k, v)); }},
        {"pairs", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.pairs = int(to_int(k, v)); }},
        {"damping", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.damping = to_double(k, v); }},
        {"snapshots", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.snapshots = to_bool(k, v); }},
        {"out", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.out = v; }},
    };
    return table;
}

bool power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{
        "verify-duality", "verify-weights", "el-residual", "picard",    "contraction",          "rearrange",
        "extremize",      "multipliers",    "kato-ponce",  "smoothing", "bootstrap-uniformity",
    };
    return names;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "experiment", "n",     "k",     "q0",    "N",          "L",      "scheme", "count", "s",       "Lambda",
        "t",          "eps",   "iters", "seed",  "grid_sizes", "refine", "trials", "pairs", "damping", "snapshots",
        "out",
    };
    return keys;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
    return {
        {"experiment", experiment},
        {"n", std::to_string(n)},
        {"k", std::to_string(k)},
        {"q0", q0.str()},
        {"N", std::to_string(N)},
        {"L", fmt_double(L)},
        {"scheme", to_string(scheme)},
        {"count", std::to_string(count)},
        {"s", fmt_double(s)},
        {"Lambda", join(Lambda)},
        {"t", t.str()},
        {"eps", join(eps)},
        {"iters", std::to_string(iters)},
        {"seed", std::to_string(seed)},
        {"grid_sizes", join(grid_sizes)},
        {"refine", refine},
        {"trials", std::to_string(trials)},
        {"pairs", std::to_string(pairs)},
        {"damping", fmt_double(damping)},
        {"snapshots", snapshots ? "true" : "false"},
        {"out", out},
    };
}

void validate(const ExperimentConfig& cfg) {
    (void)cfg.exponents();
    if (!cfg.experiment.empty()) {
        const auto& names = experiment_names();
        if (std::find(names.begin(), names.end(), cfg.experiment) == names.end())
            throw UsageError("unknown experiment '" + cfg.experiment + "'");
    }
    if (!power_of_two(cfg.N) || cfg.N < 8) throw UsageError("N must be a power of two >= 8");
    if (!(cfg.L > 0)) throw UsageError("L must be positive");
    if (cfg.count < 1) throw UsageError("count must be positive");
    if (cfg.Lambda.empty()) throw UsageError("Lambda list must not be empty");
    for (double l : cfg.Lambda)
        if (!(l >= 1)) throw UsageError("Lambda values must be >= 1");
    for (double x : cfg.eps)
        if (!(x > 0 && x < 1)) throw UsageError("eps values must lie in (0, 1)");
    for (int g : cfg.grid_sizes)
        if (!power_of_two(g) || g < 8) throw UsageError("grid_sizes entries must be powers of two >= 8");
    if (cfg.refine != "fixed_L" && cfg.refine != "fixed_h") throw UsageError("refine must be fixed_L or fixed_h");
    if (cfg.t < Rational(0) || cfg.t >= Rational(1)) throw UsageError("t must lie in [0, 1)");
    if (cfg.iters < 0 || cfg.trials < 1 || cfg.pairs < 1) throw UsageError("iters, trials and pairs must be positive");
    if (!(cfg.damping > 0 && cfg.damping <= 1)) throw UsageError("damping must lie in (0, 1]");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    const auto& table = setters();
    bool grid_given = false, scheme_given = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = table.find(key);
        if (it == table.end())
            throw UsageError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(cfg, key, value);
        grid_given = grid_given || key == "N" || key == "L";
        scheme_given = scheme_given || key == "scheme";
    }
    if (cfg.n == 3 && !grid_given) {
        cfg.N = 64;
        cfg.L = 6.0;
    }
    if (cfg.n == 3 && !scheme_given) cfg.scheme = QuadratureScheme::fibonacci_sphere;
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace kplane
