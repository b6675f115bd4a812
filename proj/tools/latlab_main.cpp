// latlab command-line harness: runs experiment configs, audits the model
// assumptions, and summarizes result directories.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "latlab/experiment.hpp"

namespace {

int exit_code_for(const latlab::ExperimentResult& res) { return res.pass ? 0 : 1; }

void print_invariants(const latlab::ExperimentResult& res) {
    for (const auto& [name, ok] : res.invariants)
        std::printf("  [%s] %s\n", ok ? "pass" : "FAIL", name.c_str());
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override, std::optional<int> threads_override) {
    latlab::ExperimentConfig cfg = latlab::load_experiment_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    if (threads_override) cfg.threads = *threads_override;
    latlab::ExperimentResult res = latlab::run_experiment(cfg, out_dir);
    std::printf("%s -> %s\n", latlab::to_string(cfg.experiment), res.csv_path.c_str());
    print_invariants(res);
    return exit_code_for(res);
}

int cmd_audit(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
    latlab::ExperimentConfig cfg = latlab::load_experiment_config(config_path);
    if (cfg.experiment != latlab::ExperimentKind::AssumptionAudit)
        throw latlab::ConfigError("$.experiment", "audit expects an assumption_audit config");
    if (seed_override) cfg.seed = *seed_override;
    latlab::ExperimentResult res = latlab::run_experiment(cfg, out_dir);
    std::printf("audit: %s -> %s\n", latlab::to_string(cfg.model.family), res.csv_path.c_str());
    print_invariants(res);
    return exit_code_for(res);
}

int cmd_report(const std::string& dir) {
    namespace fs = std::filesystem;
    bool all_pass = true;
    bool any = false;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() < 13 || name.substr(name.size() - 13) != ".summary.json") continue;
        any = true;
        std::ifstream in(entry.path());
        latlab::json j;
        in >> j;
        const bool pass = j.value("pass", false);
        all_pass = all_pass && pass;
        std::printf("%-40s %s\n", name.c_str(), pass ? "pass" : "FAIL");
        if (j.contains("invariants"))
            for (const auto& [k, v] : j["invariants"].items())
                std::printf("    %-40s %s\n", k.c_str(), v.get<bool>() ? "pass" : "FAIL");
    }
    if (!any) {
        std::fprintf(stderr, "report: no .summary.json files under %s\n", dir.c_str());
        return 2;
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for truncated lattice models"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;

    CLI::App* run = app.add_subcommand("run", "run one experiment config");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--threads", threads, "override the worker count");

    CLI::App* audit = app.add_subcommand("audit", "verify the locality/growth assumptions");
    audit->add_option("--config", config_path, "assumption_audit config (JSON)")->required();
    audit->add_option("--out", out_dir, "output directory");
    audit->add_option("--seed", seed, "override the config seed");

    CLI::App* report = app.add_subcommand("report", "summarize an output directory");
    std::string report_dir = "out";
    report->add_option("--out", report_dir, "directory with .summary.json files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, seed, threads);
        if (audit->parsed()) return cmd_audit(config_path, out_dir, seed);
        if (report->parsed()) return cmd_report(report_dir);
    } catch (const latlab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const latlab::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
