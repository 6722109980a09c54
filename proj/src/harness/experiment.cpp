#include "caplab/harness/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "caplab/io/csv.hpp"
#include "caplab/mc/nested.hpp"
#include "caplab/parallel.hpp"
#include "caplab/rng.hpp"

namespace caplab {

namespace fs = std::filesystem;

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

PathData make_training_data(const ModelSpec& model, int m, int n, std::uint64_t seed,
                            int threads) {
    const int T = model.esg.horizon;
    const int dims = ModelSpec::kDims;
    if (n <= 1) {
        return simulate_paths(model, m, substream_seed(seed, stream::kTraining), threads);
    }
    // Composite paths: outer-year drivers shared within each group of n
    // continuations.
    DriverTensor drivers;
    drivers.n_scenarios = m * n;
    drivers.steps = T;
    drivers.dims = dims;
    drivers.values.resize(m * n, T * dims);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t oi) {
        const int i = static_cast<int>(oi);
        const Eigen::VectorXd xi1 =
            driver_row(i, 1, dims, substream_seed(seed, stream::kOuter));
        for (int j = 0; j < n; ++j) {
            const int row = i * n + j;
            drivers.values.row(row).head(dims) = xi1.transpose();
            Rng rng(substream_seed(seed, stream::kTraining, i, j));
            for (int k = dims; k < T * dims; ++k) drivers.values(row, k) = rng.next_normal();
        }
    }, threads);
    PathData d;
    d.drivers = std::move(drivers);
    d.scenarios = simulate_economy(model.esg, d.drivers, threads);
    d.mortality = simulate_mortality(model.mortality, d.drivers, driver_dim::kMortality,
                                     model.esg.horizon, threads);
    d.cashflows = build_cashflow_matrix(model.product, d.scenarios, d.mortality, threads);
    return d;
}

LabContext make_context(const RunConfig& cfg) {
    cfg.validate();
    LabContext ctx;
    ctx.cfg = cfg;
    ctx.model = model_from_config(cfg);
    ctx.universe = universe_from_config(cfg);
    return ctx;
}

namespace {

void build_outer_states(LabContext& ctx) {
    const int m = ctx.cfg.budgets.benchmark_outer;
    ctx.outers.resize(m);
    ctx.outer_xi1.resize(m, ModelSpec::kDims);
    ctx.outer_account.resize(m);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
        ctx.outers[i] = outer_state_at(ctx.model, ctx.cfg.benchmark_seed, static_cast<int>(i));
        ctx.outer_xi1.row(static_cast<long>(i)) = ctx.outers[i].xi1.transpose();
        ctx.outer_account(static_cast<long>(i)) = ctx.outers[i].econ.account;
    }, ctx.cfg.threads);
}

}  // namespace

void ensure_benchmark(LabContext& ctx, bool use_cache, std::ostream* log) {
    const std::string key = benchmark_key_hex(ctx.cfg);
    const fs::path cache_dir(ctx.cfg.cache_dir);
    const fs::path cache_file = cache_dir / ("benchmark_" + key + ".csv");

    if (use_cache && fs::exists(cache_file)) {
        CsvTable t = read_csv(cache_file.string());
        const int cv = t.column("V1");
        ctx.bench_values.resize(static_cast<long>(t.rows.size()));
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            ctx.bench_values(static_cast<long>(i)) = std::stod(t.rows[i][cv]);
        if (log) *log << "benchmark: loaded " << ctx.bench_values.size() << " samples from "
                      << cache_file.string() << "\n";
    } else {
        NestedConfig nc;
        nc.m_outer = ctx.cfg.budgets.benchmark_outer;
        nc.n_inner = ctx.cfg.budgets.benchmark_inner;
        nc.seed = ctx.cfg.benchmark_seed;
        if (log) *log << "benchmark: computing " << nc.m_outer << " x " << nc.n_inner << "...\n";
        const double t0 = now_seconds();
        ctx.bench_values = nested_distribution(ctx.model, nc, ctx.cfg.threads,
                                               std::numeric_limits<long long>::max());
        if (log) *log << "benchmark: done in " << now_seconds() - t0 << " s\n";
        if (use_cache) {
            fs::create_directories(cache_dir);
            write_value_samples_csv(cache_file.string(), ctx.bench_values);
            std::ofstream manifest(cache_dir / ("benchmark_" + key + ".json"));
            manifest << nlohmann::json{{"key", key},
                                       {"seed", ctx.cfg.benchmark_seed},
                                       {"m_outer", nc.m_outer},
                                       {"n_inner", nc.n_inner}}
                            .dump(2)
                     << "\n";
        }
    }
    ctx.bench_report = make_risk_report(ctx.bench_values, ctx.cfg.alpha);
    if (ctx.outers.empty()) build_outer_states(ctx);
}

Eigen::VectorXd evaluate_method(const LabContext& ctx, const MethodOutcome& fitted,
                                std::uint64_t run_seed) {
    const int m = static_cast<int>(ctx.outers.size());
    if (fitted.method == "large-benchmark") return ctx.bench_values;
    if (fitted.method == "nested-mc") return fitted.v1;
    Eigen::VectorXd v1(m);
    if (fitted.rp) {
        parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
            v1(static_cast<long>(i)) =
                rp_value_t1(*fitted.rp, ctx.model.esg, ctx.outers[i]);
        }, ctx.cfg.threads);
        return v1;
    }
    if (!fitted.nn) throw std::logic_error("evaluate_method: nothing fitted");
    if (fitted.nn->variant == NnVariant::Rand) {
        v1 = closed_form_values_t1(*fitted.nn, ctx.outer_xi1);
        v1.array() *= ctx.outer_account.array();
        return v1;
    }
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
        v1(static_cast<long>(i)) =
            nn_mc_value(*fitted.nn, ctx.model, ctx.outers[i], ctx.cfg.nn.n_inner_eval,
                        substream_seed(run_seed, stream::kEval, i));
    }, ctx.cfg.threads, 4);
    return v1;
}

MethodOutcome run_method(const LabContext& ctx, const std::string& method,
                         std::uint64_t run_seed) {
    MethodOutcome out;
    out.method = method;
    if (method == "large-benchmark") {
        out.v1 = ctx.bench_values;
        return out;
    }
    if (method == "nested-mc") {
        NestedConfig nc;
        nc.m_outer = ctx.cfg.budgets.nested_outer;
        nc.n_inner = ctx.cfg.budgets.nested_inner;
        nc.seed = run_seed;
        const double t0 = now_seconds();
        out.v1 = nested_distribution(ctx.model, nc, ctx.cfg.threads);
        out.fit_seconds = now_seconds() - t0;
        return out;
    }

    const double t0 = now_seconds();
    PathData data = make_training_data(ctx.model, ctx.cfg.budgets.training_outer,
                                       ctx.cfg.budgets.training_inner, run_seed,
                                       ctx.cfg.threads);
    if (method == "rp") {
        out.rp = std::make_shared<RpModel>(fit_replicating_portfolio(
            ctx.universe, ctx.model.esg, data.scenarios, data.cashflows, LarsConfig{},
            ctx.cfg.universe.physical_settlement, ctx.cfg.threads));
    } else if (method == "nn-rand" || method == "nn-econ") {
        NnTrainConfig tc;
        tc.width = ctx.cfg.nn.width;
        tc.optimizer = ctx.cfg.nn.optimizer();
        tc.seed = run_seed;
        tc.threads = ctx.cfg.threads;
        if (!ctx.cfg.nn.cv_widths.empty()) {
            // Width selection on the final head, the richest regression.
            const int tau = ctx.model.esg.horizon;
            if (method == "nn-rand") {
                tc.width = cross_validate_width(
                    data.drivers.values.leftCols(ModelSpec::kDims * tau),
                    data.cashflows.cf.col(tau - 1), ctx.cfg.nn.cv_widths, ctx.cfg.nn.cv_folds,
                    run_seed, tc.optimizer);
            } else {
                Eigen::MatrixXd feats = econ_features(data.scenarios);
                tc.width = cross_validate_width(feats, data.cashflows.cf.col(tau - 1),
                                                ctx.cfg.nn.cv_widths, ctx.cfg.nn.cv_folds,
                                                run_seed, tc.optimizer);
            }
        }
        out.nn = std::make_shared<NnModel>(
            method == "nn-rand" ? train_nn_rand(data.drivers, data.cashflows, tc)
                                : train_nn_econ(data.scenarios, data.cashflows, tc));
    } else {
        throw std::invalid_argument("unknown method: " + method);
    }
    out.fit_seconds = now_seconds() - t0;

    const double t1 = now_seconds();
    out.v1 = evaluate_method(ctx, out, run_seed);
    out.eval_seconds = now_seconds() - t1;
    return out;
}

void aggregate_experiment(const LabContext& ctx, ExperimentResult& result) {
    result.benchmark = ctx.bench_report;
    std::map<std::string, std::vector<const MethodRun*>> by_method;
    for (const auto& run : result.runs)
        if (run.ok) by_method[run.method].push_back(&run);
    result.mape.clear();
    result.avg_seconds.clear();
    for (const auto& [method, runs] : by_method) {
        std::array<double, 5> row{};
        for (int k = 0; k < 5; ++k) {
            Eigen::VectorXd est(static_cast<long>(runs.size()));
            for (std::size_t i = 0; i < runs.size(); ++i)
                est(static_cast<long>(i)) = runs[i]->report.metric(k);
            row[k] = mape(est, ctx.bench_report.metric(k));
        }
        result.mape[method] = row;
        double secs = 0.0;
        for (const auto* r : runs) secs += r->fit_seconds + r->eval_seconds;
        result.avg_seconds[method] = secs / static_cast<double>(runs.size());
    }
}

ExperimentResult run_experiment(const RunConfig& cfg, std::ostream* log) {
    LabContext ctx = make_context(cfg);
    ensure_benchmark(ctx, true, log);

    ExperimentResult result;
    fs::create_directories(cfg.output_dir);
    for (int r = 0; r < cfg.budgets.macro_runs; ++r) {
        const std::uint64_t run_seed = substream_seed(cfg.experiment_seed, stream::kTraining,
                                                      static_cast<std::uint64_t>(r) + 1);
        for (const auto& method : cfg.methods) {
            MethodRun mr;
            mr.method = method;
            mr.run = r;
            try {
                MethodOutcome out = run_method(ctx, method, run_seed);
                mr.report = make_risk_report(out.v1, cfg.alpha);
                mr.fit_seconds = out.fit_seconds;
                mr.eval_seconds = out.eval_seconds;
                if (cfg.write_samples && method != "large-benchmark") {
                    write_value_samples_csv(
                        (fs::path(cfg.output_dir) /
                         ("samples_" + method + "_run" + std::to_string(r) + ".csv"))
                            .string(),
                        out.v1);
                }
            } catch (const std::exception& e) {
                mr.ok = false;
                mr.error = e.what();
            }
            if (log) {
                *log << "run " << r << " " << method;
                if (mr.ok)
                    *log << ": mean=" << mr.report.mean << " left_es=" << mr.report.left_es
                         << " (" << mr.fit_seconds + mr.eval_seconds << " s)\n";
                else
                    *log << ": FAILED: " << mr.error << "\n";
            }
            result.runs.push_back(std::move(mr));
        }
    }
    aggregate_experiment(ctx, result);
    write_experiment_outputs(cfg, result);
    return result;
}

void write_runs_csv(const std::string& path, const ExperimentResult& result) {
    CsvWriter w(path, {"method", "run", "ok", "error", "mean", "left_var", "left_es", "right_var",
                       "right_es", "fit_seconds", "eval_seconds"});
    for (const auto& r : result.runs) {
        w.field(r.method);
        w.field(static_cast<long long>(r.run));
        w.field(static_cast<long long>(r.ok ? 1 : 0));
        w.field(r.error);
        w.field(r.report.mean);
        w.field(r.report.left_var);
        w.field(r.report.left_es);
        w.field(r.report.right_var);
        w.field(r.report.right_es);
        w.field(r.fit_seconds);
        w.field(r.eval_seconds);
        w.end_row();
    }
    w.close();
}

void write_mape_csv(const std::string& path, const ExperimentResult& result) {
    CsvWriter w(path, {"method", "left_es", "left_var", "mean", "right_var", "right_es"});
    for (const auto& [method, row] : result.mape) {
        w.field(method);
        for (int k = 0; k < 5; ++k) w.field(row[k]);
        w.end_row();
    }
    w.close();
}

void write_runtime_csv(const std::string& path,
                       const std::vector<std::tuple<long long, std::string, double>>& rows) {
    CsvWriter w(path, {"samples", "method", "seconds"});
    for (const auto& [samples, method, secs] : rows) {
        w.field(samples);
        w.field(method);
        w.field(secs);
        w.end_row();
    }
    w.close();
}

void write_experiment_outputs(const RunConfig& cfg, const ExperimentResult& result) {
    fs::create_directories(cfg.output_dir);
    const fs::path out(cfg.output_dir);
    write_resolved_config((out / "resolved_config.json").string(), cfg);
    write_runs_csv((out / "runs.csv").string(), result);
    write_mape_csv((out / "mape.csv").string(), result);
    std::vector<std::tuple<long long, std::string, double>> rt;
    for (const auto& [method, secs] : result.avg_seconds)
        rt.emplace_back(cfg.budgets.training_samples(), method, secs);
    write_runtime_csv((out / "runtime.csv").string(), rt);

    CsvWriter bench((out / "benchmark_report.csv").string(),
                    {"left_es", "left_var", "mean", "right_var", "right_es", "n_samples"});
    bench.field(result.benchmark.left_es);
    bench.field(result.benchmark.left_var);
    bench.field(result.benchmark.mean);
    bench.field(result.benchmark.right_var);
    bench.field(result.benchmark.right_es);
    bench.field(result.benchmark.n_samples);
    bench.end_row();
    bench.close();
}

}  // namespace caplab
