#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "latlab/experiment.hpp"

using namespace latlab;

namespace {

json base_config(const char* experiment) {
    json j;
    j["experiment"] = experiment;
    j["model"] = {{"family", "u1_lgt"},
                  {"num_nodes", 3},
                  {"cutoff", 4},
                  {"couplings", {{"g_m", 1.0}, {"g_gm", 1.0}, {"g_e", 1.0}, {"lambda_g", 1.0}}}};
    j["grid"] = {{"lambda", {1, 2, 3}}};
    j["seed"] = 7;
    j["output"] = "t";
    return j;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag)
        : path(std::filesystem::temp_directory_path() / ("latlab_test_" + tag)) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("config: schema violations carry field paths") {
    json j = base_config("tail_scan");
    j.erase("model");
    try {
        parse_experiment_config(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.path == "$.model");
    }

    j = base_config("tail_scan");
    j["grid"]["lambda"] = json::array();
    try {
        parse_experiment_config(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.path == "$.grid.lambda");
    }

    j = base_config("tail_scan");
    j["experiment"] = "unknown_thing";
    CHECK_THROWS_AS(parse_experiment_config(j), ConfigError);

    j = base_config("tail_scan");
    j["model"]["family"] = "ising";
    CHECK_THROWS_AS(parse_experiment_config(j), ConfigError);

    j = base_config("tail_scan");
    j["model"]["couplings"]["bogus"] = 1.0;
    CHECK_THROWS_AS(parse_experiment_config(j), ConfigError);

    j = base_config("robustness_scan");
    CHECK_THROWS_AS(parse_experiment_config(j), ConfigError); // no window, no t grid
}

TEST_CASE("config: well-formed input round-trips into the struct") {
    json j = base_config("robustness_scan");
    j["grid"]["t"] = {2.0, 10.0};
    j["window"] = {{"ell", 1}, {"s", 2}};
    j["tolerances"] = {{"solver_tol", 1e-10}, {"max_iter", 500}};
    j["caps"] = {{"dense_cap", 1000}};
    j["constants"] = {{"c1", 2.0}};
    j["threads"] = 2;
    const ExperimentConfig cfg = parse_experiment_config(j);
    CHECK(cfg.experiment == ExperimentKind::RobustnessScan);
    CHECK(cfg.model.num_nodes == 3);
    CHECK(cfg.grid_lambda.size() == 3);
    CHECK(cfg.grid_t.size() == 2);
    CHECK(cfg.window.ell == 1);
    CHECK(cfg.solver_tol == 1e-10);
    CHECK(cfg.caps.dense_cap == 1000);
    CHECK(cfg.constants.c1 == 2.0);
    CHECK(cfg.threads == 2);
}

TEST_CASE("csv writer: canonical numbers and RFC-4180 quoting") {
    TempDir dir("csv");
    const std::string path = (dir.path / "x.csv").string();
    {
        CsvWriter csv(path);
        csv.row({"plain", "with,comma", "with\"quote", CsvWriter::format_number(0.1)});
    }
    const std::string got = slurp(path);
    CHECK(got == "plain,\"with,comma\",\"with\"\"quote\",0.10000000000000001\r\n");
}

TEST_CASE("determinism: identical config and seed give byte-identical CSV") {
    TempDir dir("det");
    json j = base_config("mean_abs_check");
    j["model"]["cutoff"] = 3;
    const ExperimentConfig cfg = parse_experiment_config(j);
    const ExperimentResult r1 = run_experiment(cfg, (dir.path / "a").string());
    const ExperimentResult r2 = run_experiment(cfg, (dir.path / "b").string());
    CHECK(slurp(r1.csv_path) == slurp(r2.csv_path));
    CHECK(r1.pass);
}

TEST_CASE("determinism: worker count does not change the rows") {
    TempDir dir("thr");
    json j = base_config("area_law_scan");
    j["model"]["cutoff"] = 4;
    j["model"]["num_nodes"] = 4;
    j["grid"] = {{"num_nodes", {3, 4, 5}}};
    j["tolerances"] = {{"gap_floor", 0.05}, {"full_check_cap", 3000}};
    ExperimentConfig cfg = parse_experiment_config(j);
    cfg.threads = 1;
    const ExperimentResult r1 = run_experiment(cfg, (dir.path / "a").string());
    cfg.threads = 2;
    const ExperimentResult r2 = run_experiment(cfg, (dir.path / "b").string());
    CHECK(slurp(r1.csv_path) == slurp(r2.csv_path));
}

TEST_CASE("assumption audit passes for the three families and flags the adversarial split") {
    TempDir dir("audit");
    json j = base_config("assumption_audit");
    j["grid"]["lambda"] = {1, 2, 3};
    j["adversarial"] = true;
    {
        const ExperimentConfig cfg = parse_experiment_config(j);
        const ExperimentResult res = run_experiment(cfg, (dir.path / "u1").string());
        CHECK(res.pass);
        CHECK(res.invariants.at("adversarial_split_rejected"));
        CHECK(res.invariants.at("chi_at_most_2_g_gm"));
    }
    {
        json h = j;
        h["model"] = {{"family", "hubbard_holstein"}, {"num_nodes", 2}, {"cutoff", 4}};
        const ExperimentConfig cfg = parse_experiment_config(h);
        const ExperimentResult res = run_experiment(cfg, (dir.path / "hh").string());
        CHECK(res.pass);
        CHECK(res.invariants.at("declared_r_is_half"));
    }
    {
        json s = j;
        s["model"] = {{"family", "su2_lgt"}, {"num_nodes", 2}, {"cutoff", 1}};
        s["grid"]["lambda"] = {0.5, 1.0};
        const ExperimentConfig cfg = parse_experiment_config(s);
        const ExperimentResult res = run_experiment(cfg, (dir.path / "su2").string());
        CHECK(res.pass);
    }
}

TEST_CASE("model specs round-trip through the config format") {
    json j = base_config("mean_abs_check");
    j["model"]["couplings"] = {{"g_m", 0.25}, {"g_gm", -1.5}, {"g_e", 2.0}, {"lambda_g", 0.75}};
    const ExperimentConfig cfg = parse_experiment_config(j);
    json round = base_config("mean_abs_check");
    round["model"] = to_json(cfg.model);
    const ExperimentConfig cfg2 = parse_experiment_config(round);
    CHECK(cfg2.model.family == cfg.model.family);
    CHECK(cfg2.model.num_nodes == cfg.model.num_nodes);
    CHECK(cfg2.model.cutoff == cfg.model.cutoff);
    CHECK(cfg2.model.couplings.g_m == cfg.model.couplings.g_m);
    CHECK(cfg2.model.couplings.g_gm == cfg.model.couplings.g_gm);
    CHECK(cfg2.model.couplings.g_e == cfg.model.couplings.g_e);
    CHECK(cfg2.model.couplings.lambda_g == cfg.model.couplings.lambda_g);
}

TEST_CASE("agsp scan records filter ranks and the budget table") {
    TempDir dir("agsp");
    json j = base_config("agsp_scan");
    j["model"]["cutoff"] = 4;
    j["grid"] = {{"lambda", {1}}, {"t", {20.0}}, {"ell", {2, 4}}, {"s", {2}}};
    j["window"] = {{"ell", 1}, {"s", 2}};
    const ExperimentConfig cfg = parse_experiment_config(j);
    const ExperimentResult res = run_experiment(cfg, dir.path.string());
    CHECK(res.pass);
    const std::string csv = slurp(res.csv_path);
    CHECK(csv.find("op_rank") != std::string::npos);
    // rank column populated (the restricted space fits the dense reshuffle)
    const std::string budget = slurp((dir.path / "t.budget.csv").string());
    CHECK(budget.find("worst_margin") != std::string::npos);
    const json summary = json::parse(slurp(res.summary_path));
    CHECK(summary.contains("budget_closed"));
}

TEST_CASE("failed invariants surface as a failed experiment") {
    TempDir dir("gapfail");
    json j = base_config("area_law_scan");
    j["model"]["cutoff"] = 4;
    j["grid"] = {{"num_nodes", {3, 4}}};
    j["tolerances"] = {{"gap_floor", 100.0}, {"full_check_cap", 3000}};
    const ExperimentConfig cfg = parse_experiment_config(j);
    const ExperimentResult res = run_experiment(cfg, dir.path.string());
    CHECK_FALSE(res.pass);
    CHECK_FALSE(res.invariants.at("gapped_regime"));
}

TEST_CASE("summary files record pass/fail per invariant") {
    TempDir dir("sum");
    json j = base_config("mean_abs_check");
    const ExperimentConfig cfg = parse_experiment_config(j);
    const ExperimentResult res = run_experiment(cfg, dir.path.string());
    const json summary = json::parse(slurp(res.summary_path));
    CHECK(summary["pass"].get<bool>());
    CHECK(summary["invariants"].contains("mean_abs_within_bound"));
    CHECK(summary.contains("timings_ms"));
}
