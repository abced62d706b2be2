// kplane <experiment> --config <file> [--seed S] [--out DIR] [--format json|csv|both]
//
// Exit codes: 0 all checks passed, 1 some check failed, 2 usage or
// configuration error, 3 library error (gate, geometry, divergence, I/O).

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kplane/config.hpp"
#include "kplane/errors.hpp"
#include "kplane/experiments.hpp"
#include "kplane/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments for the k-plane transform"};
    std::string experiment, config_path, out_dir, format = "both";
    std::int64_t seed = -1;
    bool list = false;
    app.add_option("experiment", experiment, "experiment name (see --list)");
    app.add_option("--config", config_path, "flat key=value configuration file");
    app.add_option("--seed", seed, "override the configured seed")->check(CLI::NonNegativeNumber);
    app.add_option("--out", out_dir, "override the configured output directory");
    app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv", "both"}));
    app.add_flag("--list", list, "print experiment names and config keys, then exit");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        std::cout << "experiments:";
        for (const auto& name : kplane::experiment_names()) std::cout << ' ' << name;
        std::cout << "\nconfig keys:";
        for (const auto& key : kplane::config_keys()) std::cout << ' ' << key;
        std::cout << '\n';
        return 0;
    }

    // OMP_NUM_THREADS is read by the OpenMP runtime itself; echo what it chose
    if (const char* env = std::getenv("OMP_NUM_THREADS")) std::fprintf(stderr, "threads: %s\n", env);

    try {
        kplane::ExperimentConfig cfg = config_path.empty() ? kplane::ExperimentConfig{} : kplane::load_config(config_path);
        if (experiment.empty()) experiment = cfg.experiment;
        if (!cfg.experiment.empty() && cfg.experiment != experiment)
            throw kplane::UsageError("config names experiment '" + cfg.experiment + "' but the command line asks for '" +
                                     experiment + "'");
        if (experiment.empty()) throw kplane::UsageError("no experiment given; see --list");
        cfg.experiment = experiment;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (!out_dir.empty()) cfg.out = out_dir;

        kplane::Report report = kplane::run(cfg);
        if (format != "csv") kplane::emit(report, kplane::ReportFormat::json, cfg.out);
        if (format != "json") kplane::emit(report, kplane::ReportFormat::csv, cfg.out);

        for (const auto& c : report.checks)
            std::printf("%-4s %s  %s: %.6g %s %.6g\n", c.criterion.c_str(), c.passed ? "PASS" : "FAIL", c.name.c_str(),
                        c.value, c.relation.c_str(), c.tolerance);
        for (const auto& [name, value] : report.constants) std::printf("     %s = %.10g\n", name.c_str(), value);
        std::printf("wall time %.2f s\n", report.wall_time);
        return report.all_passed() ? 0 : 1;
    } catch (const kplane::UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
