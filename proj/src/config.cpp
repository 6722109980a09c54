#include "caplab/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace caplab {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
    esg.validate();
    if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("config: alpha must be in (0, 0.5)");
    if (budgets.training_outer < 1 || budgets.training_inner < 1)
        throw std::invalid_argument("config: training budgets must be >= 1");
    if (budgets.nested_outer < 1 || budgets.nested_inner < 1)
        throw std::invalid_argument("config: nested budgets must be >= 1");
    if (budgets.benchmark_outer < 1 || budgets.benchmark_inner < 1)
        throw std::invalid_argument("config: benchmark budgets must be >= 1");
    if (static_cast<double>(budgets.nested_outer) * alpha < 1.0)
        throw std::invalid_argument(
            "config: nested_outer too small for the requested tail (need >= 1/alpha outers)");
    if (budgets.macro_runs < 1) throw std::invalid_argument("config: macro_runs must be >= 1");
    if (nn.width < 1) throw std::invalid_argument("config: nn width must be >= 1");
    if (nn.n_inner_eval < 1) throw std::invalid_argument("config: n_inner_eval must be >= 1");
    if (mortality.sigma_k < 0.0) throw std::invalid_argument("config: sigma_k must be >= 0");
    if (product.age_lo > product.age_hi || product.age_lo < mortality.age_min ||
        product.age_hi + esg.horizon > mortality.age_max)
        throw std::invalid_argument("config: product ages incompatible with the mortality table");
    if (product.w_equity < 0.0 || product.w_equity > 1.0)
        throw std::invalid_argument("config: w_equity must be in [0,1]");
    const std::set<std::string> known = {"large-benchmark", "nested-mc", "rp", "nn-econ",
                                         "nn-rand"};
    for (const auto& m : methods)
        if (!known.count(m)) throw std::invalid_argument("config: unknown method '" + m + "'");
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    check_keys(j, "root",
               {"esg", "mortality", "product", "universe", "methods", "budgets", "nn", "alpha",
                "seeds", "threads", "output_dir", "cache_dir", "write_samples"});
    if (j.contains("esg")) {
        const json& e = j.at("esg");
        check_keys(e, "esg",
                   {"mean_reversion", "rate_vol", "initial_rate", "equity_vol", "initial_equity",
                    "horizon"});
        get_if(e, "mean_reversion", cfg.esg.mean_reversion);
        get_if(e, "rate_vol", cfg.esg.rate_vol);
        get_if(e, "initial_rate", cfg.esg.initial_rate);
        get_if(e, "equity_vol", cfg.esg.equity_vol);
        get_if(e, "initial_equity", cfg.esg.initial_equity);
        get_if(e, "horizon", cfg.esg.horizon);
    }
    if (j.contains("mortality")) {
        const json& m = j.at("mortality");
        check_keys(m, "mortality",
                   {"drift", "sigma_k", "kappa0", "age_min", "age_max", "gompertz_intercept",
                    "gompertz_slope", "table_csv"});
        get_if(m, "drift", cfg.mortality.drift);
        get_if(m, "sigma_k", cfg.mortality.sigma_k);
        get_if(m, "kappa0", cfg.mortality.kappa0);
        get_if(m, "age_min", cfg.mortality.age_min);
        get_if(m, "age_max", cfg.mortality.age_max);
        get_if(m, "gompertz_intercept", cfg.mortality.gompertz_intercept);
        get_if(m, "gompertz_slope", cfg.mortality.gompertz_slope);
        get_if(m, "table_csv", cfg.mortality.table_csv);
    }
    if (j.contains("product")) {
        const json& p = j.at("product");
        check_keys(p, "product",
                   {"n_policyholders", "age_lo", "age_hi", "fund0", "premium", "w_equity",
                    "portfolio_csv"});
        get_if(p, "n_policyholders", cfg.product.n_policyholders);
        get_if(p, "age_lo", cfg.product.age_lo);
        get_if(p, "age_hi", cfg.product.age_hi);
        get_if(p, "fund0", cfg.product.fund0);
        get_if(p, "premium", cfg.product.premium);
        get_if(p, "w_equity", cfg.product.w_equity);
        get_if(p, "portfolio_csv", cfg.product.portfolio_csv);
    }
    if (j.contains("universe")) {
        const json& u = j.at("universe");
        check_keys(u, "universe",
                   {"zcb_maturities", "option_expiries", "option_moneyness", "swaption_expiries",
                    "swaption_tenors", "include_cash", "include_equity", "physical_settlement"});
        get_if(u, "zcb_maturities", cfg.universe.zcb_maturities);
        get_if(u, "option_expiries", cfg.universe.option_expiries);
        get_if(u, "option_moneyness", cfg.universe.option_moneyness);
        get_if(u, "swaption_expiries", cfg.universe.swaption_expiries);
        get_if(u, "swaption_tenors", cfg.universe.swaption_tenors);
        get_if(u, "include_cash", cfg.universe.include_cash);
        get_if(u, "include_equity", cfg.universe.include_equity);
        get_if(u, "physical_settlement", cfg.universe.physical_settlement);
    } else {
        cfg.universe = UniverseConfig::defaults(cfg.esg.horizon);
    }
    if (j.contains("universe") && cfg.universe.zcb_maturities.empty() &&
        cfg.universe.option_expiries.empty() && cfg.universe.swaption_expiries.empty() &&
        !cfg.universe.include_cash && !cfg.universe.include_equity)
        throw std::invalid_argument("config: empty instrument universe");
    get_if(j, "methods", cfg.methods);
    if (j.contains("budgets")) {
        const json& b = j.at("budgets");
        check_keys(b, "budgets",
                   {"training_outer", "training_inner", "nested_outer", "nested_inner",
                    "benchmark_outer", "benchmark_inner", "macro_runs"});
        get_if(b, "training_outer", cfg.budgets.training_outer);
        get_if(b, "training_inner", cfg.budgets.training_inner);
        get_if(b, "nested_outer", cfg.budgets.nested_outer);
        get_if(b, "nested_inner", cfg.budgets.nested_inner);
        get_if(b, "benchmark_outer", cfg.budgets.benchmark_outer);
        get_if(b, "benchmark_inner", cfg.budgets.benchmark_inner);
        get_if(b, "macro_runs", cfg.budgets.macro_runs);
    }
    if (j.contains("nn")) {
        const json& n = j.at("nn");
        check_keys(n, "nn",
                   {"width", "max_iterations", "gradient_tol", "f_rel_tol", "n_inner_eval",
                    "cv_widths", "cv_folds"});
        get_if(n, "width", cfg.nn.width);
        get_if(n, "max_iterations", cfg.nn.max_iterations);
        get_if(n, "gradient_tol", cfg.nn.gradient_tol);
        get_if(n, "f_rel_tol", cfg.nn.f_rel_tol);
        get_if(n, "n_inner_eval", cfg.nn.n_inner_eval);
        get_if(n, "cv_widths", cfg.nn.cv_widths);
        get_if(n, "cv_folds", cfg.nn.cv_folds);
    }
    get_if(j, "alpha", cfg.alpha);
    if (j.contains("seeds")) {
        const json& s = j.at("seeds");
        check_keys(s, "seeds", {"benchmark", "experiment"});
        get_if(s, "benchmark", cfg.benchmark_seed);
        get_if(s, "experiment", cfg.experiment_seed);
    }
    get_if(j, "threads", cfg.threads);
    get_if(j, "output_dir", cfg.output_dir);
    get_if(j, "cache_dir", cfg.cache_dir);
    get_if(j, "write_samples", cfg.write_samples);
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    in >> j;
    return config_from_json(j);
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["esg"] = {{"mean_reversion", cfg.esg.mean_reversion},
                {"rate_vol", cfg.esg.rate_vol},
                {"initial_rate", cfg.esg.initial_rate},
                {"equity_vol", cfg.esg.equity_vol},
                {"initial_equity", cfg.esg.initial_equity},
                {"horizon", cfg.esg.horizon}};
    j["mortality"] = {{"drift", cfg.mortality.drift},
                      {"sigma_k", cfg.mortality.sigma_k},
                      {"kappa0", cfg.mortality.kappa0},
                      {"age_min", cfg.mortality.age_min},
                      {"age_max", cfg.mortality.age_max},
                      {"gompertz_intercept", cfg.mortality.gompertz_intercept},
                      {"gompertz_slope", cfg.mortality.gompertz_slope},
                      {"table_csv", cfg.mortality.table_csv}};
    j["product"] = {{"n_policyholders", cfg.product.n_policyholders},
                    {"age_lo", cfg.product.age_lo},
                    {"age_hi", cfg.product.age_hi},
                    {"fund0", cfg.product.fund0},
                    {"premium", cfg.product.premium},
                    {"w_equity", cfg.product.w_equity},
                    {"portfolio_csv", cfg.product.portfolio_csv}};
    j["universe"] = {{"zcb_maturities", cfg.universe.zcb_maturities},
                     {"option_expiries", cfg.universe.option_expiries},
                     {"option_moneyness", cfg.universe.option_moneyness},
                     {"swaption_expiries", cfg.universe.swaption_expiries},
                     {"swaption_tenors", cfg.universe.swaption_tenors},
                     {"include_cash", cfg.universe.include_cash},
                     {"include_equity", cfg.universe.include_equity},
                     {"physical_settlement", cfg.universe.physical_settlement}};
    j["methods"] = cfg.methods;
    j["budgets"] = {{"training_outer", cfg.budgets.training_outer},
                    {"training_inner", cfg.budgets.training_inner},
                    {"nested_outer", cfg.budgets.nested_outer},
                    {"nested_inner", cfg.budgets.nested_inner},
                    {"benchmark_outer", cfg.budgets.benchmark_outer},
                    {"benchmark_inner", cfg.budgets.benchmark_inner},
                    {"macro_runs", cfg.budgets.macro_runs}};
    j["nn"] = {{"width", cfg.nn.width},
               {"max_iterations", cfg.nn.max_iterations},
               {"gradient_tol", cfg.nn.gradient_tol},
               {"f_rel_tol", cfg.nn.f_rel_tol},
               {"n_inner_eval", cfg.nn.n_inner_eval},
               {"cv_widths", cfg.nn.cv_widths},
               {"cv_folds", cfg.nn.cv_folds}};
    j["alpha"] = cfg.alpha;
    j["seeds"] = {{"benchmark", cfg.benchmark_seed}, {"experiment", cfg.experiment_seed}};
    j["threads"] = cfg.threads;
    j["output_dir"] = cfg.output_dir;
    j["cache_dir"] = cfg.cache_dir;
    j["write_samples"] = cfg.write_samples;
    return j;
}

void write_resolved_config(const std::string& path, const RunConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out << config_to_json(cfg).dump(2) << "\n";
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {
std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}
}  // namespace

std::string config_hash_hex(const RunConfig& cfg) {
    return hex16(fnv1a(config_to_json(cfg).dump()));
}

std::string benchmark_key_hex(const RunConfig& cfg) {
    json j = config_to_json(cfg);
    json key;
    key["esg"] = j["esg"];
    key["mortality"] = j["mortality"];
    key["product"] = j["product"];
    key["benchmark_outer"] = cfg.budgets.benchmark_outer;
    key["benchmark_inner"] = cfg.budgets.benchmark_inner;
    key["seed"] = cfg.benchmark_seed;
    return hex16(fnv1a(key.dump()));
}

ModelSpec model_from_config(const RunConfig& cfg) {
    ModelSpec m;
    m.esg = cfg.esg;

    LeeCarterParams dynamics;
    dynamics.drift = cfg.mortality.drift;
    dynamics.sigma_k = cfg.mortality.sigma_k;
    dynamics.kappa0 = cfg.mortality.kappa0;
    if (!cfg.mortality.table_csv.empty()) {
        m.mortality = read_mortality_table_csv(cfg.mortality.table_csv, dynamics);
    } else {
        dynamics.age_min = cfg.mortality.age_min;
        dynamics.age_max = cfg.mortality.age_max;
        dynamics.a.resize(dynamics.n_ages());
        dynamics.b.resize(dynamics.n_ages());
        for (int i = 0; i < dynamics.n_ages(); ++i) {
            dynamics.a(i) = cfg.mortality.gompertz_intercept +
                            cfg.mortality.gompertz_slope * (dynamics.age_min + i);
            dynamics.b(i) = 1.0 / dynamics.n_ages();
        }
        m.mortality = dynamics;
    }

    if (!cfg.product.portfolio_csv.empty()) {
        m.product = read_portfolio_csv(cfg.product.portfolio_csv, cfg.product.w_equity,
                                       1.0 - cfg.product.w_equity);
    } else {
        m.product = GmdbProduct::defaults(cfg.product.n_policyholders, cfg.product.age_lo,
                                          cfg.product.age_hi, cfg.product.fund0,
                                          cfg.product.premium);
        m.product.w_equity = cfg.product.w_equity;
        m.product.w_cash = 1.0 - cfg.product.w_equity;
    }
    m.validate();
    return m;
}

std::vector<Instrument> universe_from_config(const RunConfig& cfg) {
    UniverseConfig u = cfg.universe;
    if (u.zcb_maturities.empty() && u.option_expiries.empty() && u.swaption_expiries.empty())
        u = UniverseConfig::defaults(cfg.esg.horizon);
    return build_universe(u, cfg.esg);
}

}  // namespace caplab
