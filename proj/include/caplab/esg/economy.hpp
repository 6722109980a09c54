#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "caplab/esg/drivers.hpp"
#include "caplab/esg/params.hpp"

namespace caplab {

/// Joint risk-neutral paths of the short rate, cash account and equity index
/// on the annual grid t0..horizon. Conditional sets (t0 > 0) are rebased so
/// the account equals 1 at t0; base_account keeps the absolute account value
/// there.
struct ScenarioSet {
    EsgParams params;
    int t0 = 0;
    double base_account = 1.0;
    Eigen::MatrixXd short_rate;  // n x (horizon - t0 + 1)
    Eigen::MatrixXd account;
    Eigen::MatrixXd equity;

    int n() const { return static_cast<int>(short_rate.rows()); }
    int horizon() const { return params.horizon; }
    int col(int t) const { return t - t0; }

    double r(int i, int t) const { return short_rate(i, col(t)); }
    double B(int i, int t) const { return account(i, col(t)); }
    double S(int i, int t) const { return equity(i, col(t)); }
    /// Deflator relative to t0.
    double deflator(int i, int t) const { return 1.0 / account(i, col(t)); }
};

/// Time-t0 economic state a conditional simulation starts from.
struct EconState {
    double t0 = 1.0;
    double r = 0.0;
    double account = 1.0;  // absolute cash-account value at t0
    double equity = 0.0;
};

/// Exact annual-step simulation from t=0. drivers must provide >= 2 dimensions
/// and horizon steps.
ScenarioSet simulate_economy(const EsgParams& params, const DriverTensor& drivers,
                             int threads = 0);

/// Conditional continuation from an intermediate state; same transition as
/// simulate_economy, account rebased to 1 at the start.
ScenarioSet simulate_economy_from(const EsgParams& params, const DriverTensor& drivers,
                                  const EconState& state, int threads = 0);

/// Risk-neutral inner paths over t in (t0..horizon] conditional on the outer
/// state; deflators rebased so D = 1 at t0. Deterministic per (state, seed).
ScenarioSet condition_scenarios(const EconState& state, const EsgParams& params, int n_inner,
                                std::uint64_t seed, int threads = 0);

/// CSV export/import: one row per (scenario, time), columns scenario_id, t, r,
/// B, S and xi_d. The xi columns of row t carry the draws of the step into t
/// (zeros at t = t0).
void write_scenario_csv(const std::string& path, const ScenarioSet& set,
                        const DriverTensor* drivers = nullptr);
struct ScenarioCsv {
    ScenarioSet set;
    DriverTensor drivers;
};
ScenarioCsv read_scenario_csv(const std::string& path, const EsgParams& params);

}  // namespace caplab
