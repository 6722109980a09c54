#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "caplab/config.hpp"
#include "caplab/metrics/risk.hpp"
#include "caplab/model.hpp"
#include "caplab/proxy/nn.hpp"
#include "caplab/proxy/rp.hpp"

namespace caplab {

/// Training paths of one macro-run: m outer-year draws, each continued by n
/// risk-neutral continuations (n = 1 gives plain full paths). Deterministic
/// per seed; row i of a larger m extends a smaller one.
PathData make_training_data(const ModelSpec& model, int m, int n, std::uint64_t seed,
                            int threads = 0);

/// Everything shared across macro-runs: the model, the universe, the cached
/// benchmark distribution and the benchmark outer states every proxy is
/// valued on (fully out-of-sample relative to training seeds).
struct LabContext {
    RunConfig cfg;
    ModelSpec model;
    std::vector<Instrument> universe;
    Eigen::VectorXd bench_values;
    RiskReport bench_report;
    std::vector<OuterState> outers;
    Eigen::MatrixXd outer_xi1;      // M_b x dims
    Eigen::VectorXd outer_account;  // B1 per outer state
};

LabContext make_context(const RunConfig& cfg);

/// Loads the benchmark from the cache keyed by (model, budgets, seed) or
/// computes and stores it. Fills bench_values/report and the outer states.
void ensure_benchmark(LabContext& ctx, bool use_cache = true, std::ostream* log = nullptr);

struct MethodOutcome {
    std::string method;
    Eigen::VectorXd v1;
    double fit_seconds = 0.0;   // data generation + calibration
    double eval_seconds = 0.0;  // prediction over the outer states
    std::shared_ptr<RpModel> rp;
    std::shared_ptr<NnModel> nn;
};

/// One macro-run of one method. Training data and evaluation substreams are
/// derived from run_seed, so a run is reproducible in isolation.
MethodOutcome run_method(const LabContext& ctx, const std::string& method,
                         std::uint64_t run_seed);

/// Values an already-fitted method on the context's outer states.
Eigen::VectorXd evaluate_method(const LabContext& ctx, const MethodOutcome& fitted,
                                std::uint64_t run_seed);

struct MethodRun {
    std::string method;
    int run = 0;
    bool ok = true;
    std::string error;
    RiskReport report;
    double fit_seconds = 0.0;
    double eval_seconds = 0.0;
};

struct ExperimentResult {
    RiskReport benchmark;
    std::vector<MethodRun> runs;
    std::map<std::string, std::array<double, 5>> mape;  // metric order of RiskReport
    std::map<std::string, double> avg_seconds;          // fit + eval per run
};

ExperimentResult run_experiment(const RunConfig& cfg, std::ostream* log = nullptr);

/// Aggregates MApE tables from per-run reports against the benchmark.
void aggregate_experiment(const LabContext& ctx, ExperimentResult& result);

void write_runs_csv(const std::string& path, const ExperimentResult& result);
void write_mape_csv(const std::string& path, const ExperimentResult& result);
void write_runtime_csv(const std::string& path,
                       const std::vector<std::tuple<long long, std::string, double>>& rows);
void write_experiment_outputs(const RunConfig& cfg, const ExperimentResult& result);

double now_seconds();

}  // namespace caplab
