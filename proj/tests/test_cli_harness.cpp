#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "caplab/harness/experiment.hpp"
#include "caplab/io/csv.hpp"

using namespace caplab;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_config(const std::string& tag) {
    RunConfig cfg;
    cfg.esg.horizon = 6;
    cfg.product.n_policyholders = 20;
    cfg.product.age_lo = 40;
    cfg.product.age_hi = 45;
    cfg.universe = UniverseConfig{};
    cfg.universe.zcb_maturities = {1, 3, 6};
    cfg.universe.option_expiries = {3};
    cfg.universe.option_moneyness = {1.0};
    cfg.universe.swaption_expiries = {2};
    cfg.universe.swaption_tenors = {3};
    cfg.budgets.training_outer = 300;
    cfg.budgets.training_inner = 1;
    cfg.budgets.nested_outer = 100;
    cfg.budgets.nested_inner = 5;
    cfg.budgets.benchmark_outer = 150;
    cfg.budgets.benchmark_inner = 10;
    cfg.budgets.macro_runs = 2;
    cfg.nn.width = 2;
    cfg.nn.max_iterations = 60;
    cfg.nn.n_inner_eval = 10;
    cfg.output_dir = "cli_test_" + tag + "/out";
    cfg.cache_dir = "cli_test_" + tag + "/cache";
    cfg.write_samples = false;
    return cfg;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CAPLAB_CLI_PATH) + " " + args;
    return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("config json round-trips and rejects unknown keys") {
    RunConfig cfg = tiny_config("cfg");
    nlohmann::json j = config_to_json(cfg);
    RunConfig back = config_from_json(j);
    CHECK(config_hash_hex(back) == config_hash_hex(cfg));
    CHECK(back.esg.horizon == 6);

    nlohmann::json bad = j;
    bad["esg"]["typo_field"] = 1.0;
    CHECK_THROWS(config_from_json(bad));
    nlohmann::json bad2 = j;
    bad2["alpha"] = 0.9;
    CHECK_THROWS(config_from_json(bad2));
}

TEST_CASE("composite training data shares the outer year within a group") {
    ModelSpec m = ModelSpec::defaults();
    m.esg.horizon = 4;
    m.product = GmdbProduct::defaults(10, 40, 44);
    PathData d = make_training_data(m, 5, 3, 77);
    CHECK(d.drivers.n_scenarios == 15);
    for (int i = 0; i < 5; ++i)
        for (int j = 1; j < 3; ++j)
            CHECK(d.drivers.values.row(i * 3 + j).head(3) ==
                  d.drivers.values.row(i * 3).head(3));
    // and the plain case reduces to full paths
    PathData flat = make_training_data(m, 7, 1, 77);
    CHECK(flat.drivers.n_scenarios == 7);
}

TEST_CASE("run_experiment produces deterministic per-run reports and tables") {
    RunConfig cfg = tiny_config("exp");
    cfg.methods = {"nested-mc", "rp"};
    ExperimentResult a = run_experiment(cfg);
    ExperimentResult b = run_experiment(cfg);  // second run loads the cache
    REQUIRE(a.runs.size() == 4);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].ok);
        CHECK(a.runs[i].report.mean == b.runs[i].report.mean);
        CHECK(a.runs[i].report.left_es == b.runs[i].report.left_es);
    }
    CHECK(a.mape.at("nested-mc") == b.mape.at("nested-mc"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "runs.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "mape.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "runtime.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "resolved_config.json"));
    fs::remove_all("cli_test_exp");
}

TEST_CASE("the benchmark evaluated against itself has zero error") {
    RunConfig cfg = tiny_config("self");
    cfg.methods = {"large-benchmark"};
    cfg.budgets.macro_runs = 1;
    ExperimentResult r = run_experiment(cfg);
    REQUIRE(r.runs.size() == 1);
    CHECK(r.runs[0].ok);
    for (int k = 0; k < 5; ++k) CHECK(r.mape.at("large-benchmark")[k] == 0.0);
    // Table-1 shape: the five statistics of the benchmark report.
    CHECK(RiskReport::metric_names().size() == 5);
    fs::remove_all("cli_test_self");
}

TEST_CASE("cli generate/fit/evaluate round-trip with byte-identical regeneration") {
    RunConfig cfg = tiny_config("cli");
    cfg.methods = {"rp", "nn-rand"};
    fs::create_directories("cli_test_cli");
    const std::string cfg_path = "cli_test_cli/config.json";
    {
        std::ofstream out(cfg_path);
        out << config_to_json(cfg).dump(2);
    }

    REQUIRE(run_cli("generate --config " + cfg_path) == 0);
    CHECK(fs::exists(fs::path(cfg.output_dir) / "manifest.json"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "drivers.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "scenarios.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "mortality.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "cashflows.csv"));

    // manifest row counts match the files
    {
        std::ifstream in(fs::path(cfg.output_dir) / "manifest.json");
        nlohmann::json m;
        in >> m;
        for (const auto& [file, rows] : m.at("rows").items()) {
            std::ifstream f(fs::path(cfg.output_dir) / file);
            long long lines = 0;
            std::string line;
            while (std::getline(f, line)) ++lines;
            CHECK(lines == rows.get<long long>() + 1);  // header included
        }
    }

    const std::string cf_bytes = read_file(fs::path(cfg.output_dir) / "cashflows.csv");
    const std::string drv_bytes = read_file(fs::path(cfg.output_dir) / "drivers.csv");
    REQUIRE(run_cli("generate --config " + cfg_path) == 0);
    CHECK(read_file(fs::path(cfg.output_dir) / "cashflows.csv") == cf_bytes);
    CHECK(read_file(fs::path(cfg.output_dir) / "drivers.csv") == drv_bytes);

    REQUIRE(run_cli("fit --config " + cfg_path) == 0);
    CHECK(fs::exists(fs::path(cfg.output_dir) / "rp_model.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "nn_rand.model"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "fit_diagnostics.json"));
    const std::string rp_bytes = read_file(fs::path(cfg.output_dir) / "rp_model.csv");
    const std::string nn_bytes = read_file(fs::path(cfg.output_dir) / "nn_rand.model");
    REQUIRE(run_cli("fit --config " + cfg_path) == 0);
    CHECK(read_file(fs::path(cfg.output_dir) / "rp_model.csv") == rp_bytes);
    CHECK(read_file(fs::path(cfg.output_dir) / "nn_rand.model") == nn_bytes);

    // evaluate requires the benchmark cache
    CHECK(run_cli("evaluate --config " + cfg_path + " 2>/dev/null") != 0);
    REQUIRE(run_cli("benchmark --config " + cfg_path) == 0);
    REQUIRE(run_cli("evaluate --config " + cfg_path) == 0);
    CHECK(fs::exists(fs::path(cfg.output_dir) / "mape.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "runtime.csv"));
    {
        CsvTable rt = read_csv((fs::path(cfg.output_dir) / "runtime.csv").string());
        const int cs = rt.column("seconds");
        for (const auto& row : rt.rows) CHECK(std::stod(row[cs]) > 0.0);
    }
    fs::remove_all("cli_test_cli");
}

TEST_CASE("a failing method flags the run without aborting the experiment") {
    RunConfig cfg = tiny_config("fail");
    cfg.methods = {"nested-mc"};
    cfg.budgets.macro_runs = 1;
    cfg.budgets.nested_inner = 2000000000;  // trips the budget guard
    ExperimentResult r = run_experiment(cfg);
    REQUIRE(r.runs.size() == 1);
    CHECK(!r.runs[0].ok);
    CHECK(!r.runs[0].error.empty());
    CHECK(r.mape.find("nested-mc") == r.mape.end());
    fs::remove_all("cli_test_fail");
}
