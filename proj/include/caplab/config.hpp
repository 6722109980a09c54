#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "caplab/math/lbfgs.hpp"
#include "caplab/model.hpp"
#include "caplab/proxy/instruments.hpp"

namespace caplab {

struct Budgets {
    int training_outer = 10000;  // m
    int training_inner = 1;      // n; training paths = m * n
    int nested_outer = 100;      // M of the budget-constrained nested estimator
    int nested_inner = 100;      // N
    int benchmark_outer = 20000;
    int benchmark_inner = 1000;
    int macro_runs = 100;  // R

    long long training_samples() const {
        return static_cast<long long>(training_outer) * training_inner;
    }
};

struct NnConfig {
    int width = 100;
    int max_iterations = 500;
    double gradient_tol = 1e-8;
    double f_rel_tol = 1e-10;
    int n_inner_eval = 100;
    std::vector<int> cv_widths;  // non-empty enables width cross-validation
    int cv_folds = 5;

    LbfgsOptions optimizer() const {
        LbfgsOptions o;
        o.max_iterations = max_iterations;
        o.gradient_tol = gradient_tol;
        o.f_rel_tol = f_rel_tol;
        return o;
    }
};

struct MortalityConfig {
    double drift = -0.365;
    double sigma_k = 0.6;
    double kappa0 = 0.0;
    int age_min = 30;
    int age_max = 110;
    double gompertz_intercept = -9.5;
    double gompertz_slope = 0.085;
    std::string table_csv;  // optional external (x, a_x, b_x) table
};

struct ProductConfig {
    int n_policyholders = 1000;
    int age_lo = 30;
    int age_hi = 70;
    double fund0 = 100.0;
    double premium = 10.0;
    double w_equity = 0.6;
    std::string portfolio_csv;  // optional external portfolio
};

struct RunConfig {
    EsgParams esg;
    MortalityConfig mortality;
    ProductConfig product;
    UniverseConfig universe;  // empty vectors = defaults for the horizon
    std::vector<std::string> methods = {"nested-mc", "rp", "nn-econ", "nn-rand"};
    Budgets budgets;
    NnConfig nn;
    double alpha = 0.01;
    std::uint64_t benchmark_seed = 42;
    std::uint64_t experiment_seed = 1234;
    int threads = 0;
    std::string output_dir = "out";
    std::string cache_dir = "cache";
    bool write_samples = true;

    void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);
void write_resolved_config(const std::string& path, const RunConfig& cfg);

/// FNV-1a over the canonical JSON serialization.
std::uint64_t fnv1a(const std::string& text);
std::string config_hash_hex(const RunConfig& cfg);
/// Hash of the pieces the benchmark depends on (model, benchmark budgets,
/// benchmark seed); keys the on-disk cache.
std::string benchmark_key_hex(const RunConfig& cfg);

ModelSpec model_from_config(const RunConfig& cfg);
std::vector<Instrument> universe_from_config(const RunConfig& cfg);

}  // namespace caplab
