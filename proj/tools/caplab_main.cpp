// caplab: solvency-capital proxy-model laboratory.
//
// Subcommands:
//   generate  - simulate a training dataset (drivers, scenarios, mortality,
//               cash flows) and write it as CSV with a manifest
//   fit       - fit the requested proxy methods on a generated dataset
//   evaluate  - value fitted models against the cached benchmark and emit
//               MApE / runtime tables
//   benchmark - compute (or load) the large nested-MC benchmark
//   full-run  - benchmark + macro-runs + tables in one go

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "caplab/harness/experiment.hpp"
#include "caplab/io/csv.hpp"
#include "caplab/mc/nested.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace caplab;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> methods;
    int macro_runs = -1;
    long long seed = -1;
    int threads = -1;
};

RunConfig resolve_config(const CommonArgs& args) {
    RunConfig cfg = args.config_path.empty() ? RunConfig{} : load_config(args.config_path);
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    if (!args.methods.empty()) cfg.methods = args.methods;
    if (args.macro_runs > 0) cfg.budgets.macro_runs = args.macro_runs;
    if (args.seed >= 0) cfg.experiment_seed = static_cast<std::uint64_t>(args.seed);
    if (args.threads > 0) cfg.threads = args.threads;
    cfg.validate();
    return cfg;
}

void write_manifest(const fs::path& dir, const RunConfig& cfg,
                    const std::vector<std::pair<std::string, long long>>& rows) {
    json m;
    m["config_hash"] = config_hash_hex(cfg);
    m["seed"] = cfg.experiment_seed;
    json files = json::object();
    for (const auto& [name, count] : rows) files[name] = count;
    m["rows"] = files;
    std::ofstream out(dir / "manifest.json");
    out << m.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write manifest");
}

json read_manifest(const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw std::runtime_error("missing manifest.json in " + dir.string());
    json m;
    in >> m;
    return m;
}

int cmd_generate(const CommonArgs& args) {
    RunConfig cfg = resolve_config(args);
    ModelSpec model = model_from_config(cfg);
    const fs::path out(cfg.output_dir);
    fs::create_directories(out);
    write_resolved_config((out / "resolved_config.json").string(), cfg);

    PathData data = make_training_data(model, cfg.budgets.training_outer,
                                       cfg.budgets.training_inner, cfg.experiment_seed,
                                       cfg.threads);
    const int n = data.drivers.n_scenarios;
    const int T = model.esg.horizon;

    {
        std::vector<std::string> header = {"scenario_id", "t"};
        for (int d = 0; d < data.drivers.dims; ++d) header.push_back("xi_" + std::to_string(d));
        CsvWriter w((out / "drivers.csv").string(), header);
        for (int i = 0; i < n; ++i)
            for (int t = 1; t <= T; ++t) {
                w.field(static_cast<long long>(i));
                w.field(static_cast<long long>(t));
                for (int d = 0; d < data.drivers.dims; ++d) w.field(data.drivers.xi(i, t, d));
                w.end_row();
            }
        w.close();
    }
    write_scenario_csv((out / "scenarios.csv").string(), data.scenarios, &data.drivers);
    {
        CsvWriter w((out / "mortality.csv").string(), {"scenario_id", "t", "kappa"});
        for (int i = 0; i < n; ++i)
            for (int t = 0; t <= T; ++t) {
                w.field(static_cast<long long>(i));
                w.field(static_cast<long long>(t));
                w.field(data.mortality.kappa_at(i, t));
                w.end_row();
            }
        w.close();
    }
    write_cashflow_csv((out / "cashflows.csv").string(), data.cashflows);
    write_mortality_table_csv((out / "mortality_table.csv").string(), model.mortality);
    write_portfolio_csv((out / "portfolio.csv").string(), model.product);

    write_manifest(out, cfg,
                   {{"drivers.csv", static_cast<long long>(n) * T},
                    {"scenarios.csv", static_cast<long long>(n) * (T + 1)},
                    {"mortality.csv", static_cast<long long>(n) * (T + 1)},
                    {"cashflows.csv", static_cast<long long>(n) * T}});
    std::cout << "generated " << n << " scenarios over " << T << " years in " << out.string()
              << "\n";
    return 0;
}

PathData load_dataset(const fs::path& dir, const RunConfig& cfg, const ModelSpec& model) {
    const json manifest = read_manifest(dir);
    if (manifest.at("config_hash").get<std::string>() != config_hash_hex(cfg))
        throw std::runtime_error("dataset manifest does not match this configuration");
    PathData d;
    ScenarioCsv sc = read_scenario_csv((dir / "scenarios.csv").string(), cfg.esg);
    d.scenarios = std::move(sc.set);
    d.drivers = std::move(sc.drivers);
    for (const auto& [file, rows] : manifest.at("rows").items()) {
        CsvTable t = read_csv((dir / file).string());
        if (static_cast<long long>(t.rows.size()) != rows.get<long long>())
            throw std::runtime_error("row count mismatch for " + file);
    }
    // kappa paths
    {
        CsvTable t = read_csv((dir / "mortality.csv").string());
        const int ci = t.column("scenario_id"), ct = t.column("t"), ck = t.column("kappa");
        d.mortality.params = model.mortality;
        d.mortality.t0 = 0;
        d.mortality.kappa.resize(d.scenarios.n(), model.esg.horizon + 1);
        for (const auto& row : t.rows)
            d.mortality.kappa(std::stoi(row[ci]), std::stoi(row[ct])) = std::stod(row[ck]);
    }
    {
        CsvTable t = read_csv((dir / "cashflows.csv").string());
        const int ci = t.column("scenario_id"), ct = t.column("tau"), cc = t.column("cf");
        d.cashflows.t0 = 0;
        d.cashflows.cf.resize(d.scenarios.n(), model.esg.horizon);
        for (const auto& row : t.rows)
            d.cashflows.cf(std::stoi(row[ci]), std::stoi(row[ct]) - 1) = std::stod(row[cc]);
    }
    return d;
}

int cmd_fit(const CommonArgs& args, const std::string& data_dir) {
    RunConfig cfg = resolve_config(args);
    ModelSpec model = model_from_config(cfg);
    const fs::path out(cfg.output_dir);
    fs::create_directories(out);
    write_resolved_config((out / "resolved_config.json").string(), cfg);
    PathData data = load_dataset(data_dir.empty() ? fs::path(cfg.output_dir) : fs::path(data_dir),
                                 cfg, model);

    json diagnostics = json::object();
    for (const auto& method : cfg.methods) {
        if (method == "nested-mc" || method == "large-benchmark") continue;
        const double t0 = now_seconds();
        if (method == "rp") {
            RpModel rp = fit_replicating_portfolio(universe_from_config(cfg), model.esg,
                                                   data.scenarios, data.cashflows, LarsConfig{},
                                                   cfg.universe.physical_settlement, cfg.threads);
            write_rp_csv((out / "rp_model.csv").string(), rp);
            json path = json::array();
            for (const auto& pt : rp.bic_path)
                path.push_back({{"lambda", pt.lambda},
                                {"rss", pt.rss},
                                {"df", pt.df},
                                {"bic", pt.bic}});
            diagnostics[method] = {{"fit_seconds", now_seconds() - t0},
                                   {"samples", data.scenarios.n()},
                                   {"nonzero", rp.nonzero_count()},
                                   {"selected_index", rp.selected_index},
                                   {"bic_path", path},
                                   {"notes", rp.notes}};
        } else {
            NnTrainConfig tc;
            tc.width = cfg.nn.width;
            tc.optimizer = cfg.nn.optimizer();
            tc.seed = cfg.experiment_seed;
            tc.threads = cfg.threads;
            NnModel nn = method == "nn-rand" ? train_nn_rand(data.drivers, data.cashflows, tc)
                                             : train_nn_econ(data.scenarios, data.cashflows, tc);
            const std::string file = method == "nn-rand" ? "nn_rand.model" : "nn_econ.model";
            write_nn_model((out / file).string(), nn);
            double loss = 0.0;
            for (const auto& h : nn.heads) loss += h.final_loss;
            diagnostics[method] = {{"fit_seconds", now_seconds() - t0},
                                   {"samples", data.scenarios.n()},
                                   {"width", nn.width},
                                   {"total_mse", loss}};
        }
        std::cout << "fitted " << method << "\n";
    }
    std::ofstream diag(out / "fit_diagnostics.json");
    diag << diagnostics.dump(2) << "\n";
    return 0;
}

int cmd_benchmark(const CommonArgs& args) {
    RunConfig cfg = resolve_config(args);
    LabContext ctx = make_context(cfg);
    ensure_benchmark(ctx, true, &std::cout);
    fs::create_directories(cfg.output_dir);
    write_resolved_config((fs::path(cfg.output_dir) / "resolved_config.json").string(), cfg);
    write_value_samples_csv((fs::path(cfg.output_dir) / "benchmark.csv").string(),
                            ctx.bench_values);
    std::cout << "benchmark mean=" << ctx.bench_report.mean
              << " left_es=" << ctx.bench_report.left_es << " (" << ctx.bench_values.size()
              << " samples)\n";
    return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& models_dir) {
    RunConfig cfg = resolve_config(args);
    LabContext ctx = make_context(cfg);
    const std::string key = benchmark_key_hex(cfg);
    if (!fs::exists(fs::path(cfg.cache_dir) / ("benchmark_" + key + ".csv")))
        throw std::runtime_error("missing benchmark cache (run `caplab benchmark` first)");
    ensure_benchmark(ctx, true, nullptr);

    const fs::path models(models_dir.empty() ? cfg.output_dir : models_dir);
    const fs::path out(cfg.output_dir);
    fs::create_directories(out);
    write_resolved_config((out / "resolved_config.json").string(), cfg);

    json diagnostics = json::object();
    if (fs::exists(models / "fit_diagnostics.json")) {
        std::ifstream in(models / "fit_diagnostics.json");
        in >> diagnostics;
    }

    ExperimentResult result;
    std::vector<std::tuple<long long, std::string, double>> runtime_rows;
    for (const auto& method : cfg.methods) {
        MethodOutcome fitted;
        fitted.method = method;
        double fit_seconds = 0.0;
        long long samples = cfg.budgets.training_samples();
        if (method == "rp") {
            fitted.rp = std::make_shared<RpModel>(
                read_rp_csv((models / "rp_model.csv").string(), cfg.esg));
        } else if (method == "nn-rand" || method == "nn-econ") {
            const std::string file = method == "nn-rand" ? "nn_rand.model" : "nn_econ.model";
            fitted.nn = std::make_shared<NnModel>(read_nn_model((models / file).string()));
        } else if (method == "nested-mc") {
            NestedConfig nc{cfg.budgets.nested_outer, cfg.budgets.nested_inner,
                            cfg.experiment_seed};
            const double t0 = now_seconds();
            fitted.v1 = nested_distribution(ctx.model, nc, cfg.threads);
            fit_seconds = now_seconds() - t0;
        }
        if (diagnostics.contains(method)) {
            fit_seconds = diagnostics[method].value("fit_seconds", fit_seconds);
            samples = diagnostics[method].value("samples", samples);
        }
        MethodRun mr;
        mr.method = method;
        mr.run = 0;
        try {
            const double t0 = now_seconds();
            Eigen::VectorXd v1 = evaluate_method(ctx, fitted, cfg.experiment_seed);
            mr.eval_seconds = now_seconds() - t0;
            mr.fit_seconds = fit_seconds;
            mr.report = make_risk_report(v1, cfg.alpha);
        } catch (const std::exception& e) {
            mr.ok = false;
            mr.error = e.what();
        }
        result.runs.push_back(mr);
        runtime_rows.emplace_back(samples, method, mr.fit_seconds + mr.eval_seconds);
    }
    aggregate_experiment(ctx, result);
    write_runs_csv((out / "runs.csv").string(), result);
    write_mape_csv((out / "mape.csv").string(), result);
    write_runtime_csv((out / "runtime.csv").string(), runtime_rows);
    std::cout << "wrote " << (out / "mape.csv").string() << "\n";
    return 0;
}

int cmd_full_run(const CommonArgs& args) {
    RunConfig cfg = resolve_config(args);
    ExperimentResult result = run_experiment(cfg, &std::cout);
    std::cout << "MApE (left ES):\n";
    for (const auto& [method, row] : result.mape)
        std::cout << "  " << method << ": " << row[0] * 100.0 << "%\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"caplab: solvency-capital proxy-model laboratory"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string data_dir, models_dir;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "JSON configuration file");
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--methods", args.methods, "methods to run")->delimiter(',');
        sub->add_option("--macro-runs", args.macro_runs, "number of macro-runs");
        sub->add_option("--seed", args.seed, "experiment seed");
        sub->add_option("--threads", args.threads, "worker threads (0 = all cores)");
    };

    CLI::App* generate = app.add_subcommand("generate", "simulate a dataset");
    add_common(generate);
    CLI::App* fit = app.add_subcommand("fit", "fit proxy models on a dataset");
    add_common(fit);
    fit->add_option("--data", data_dir, "dataset directory (default: output dir)");
    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate fitted models");
    add_common(evaluate);
    evaluate->add_option("--models", models_dir, "fitted-model directory (default: output dir)");
    CLI::App* benchmark = app.add_subcommand("benchmark", "compute or load the benchmark");
    add_common(benchmark);
    CLI::App* full = app.add_subcommand("full-run", "benchmark + macro-runs + tables");
    add_common(full);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(args);
        if (fit->parsed()) return cmd_fit(args, data_dir);
        if (evaluate->parsed()) return cmd_evaluate(args, models_dir);
        if (benchmark->parsed()) return cmd_benchmark(args);
        if (full->parsed()) return cmd_full_run(args);
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
