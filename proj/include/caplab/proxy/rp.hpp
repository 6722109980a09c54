#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "caplab/model.hpp"
#include "caplab/product/gmdb.hpp"
#include "caplab/proxy/instruments.hpp"
#include "caplab/proxy/lars.hpp"

namespace caplab {

/// Sparse replicating portfolio: instrument weights fitted by LARS-lasso with
/// BIC stopping on the stacked per-tau cash-flow regression.
struct RpModel {
    std::vector<Instrument> instruments;
    Eigen::VectorXd weights;
    double intercept = 0.0;
    int horizon = 0;
    bool physical_settlement = true;

    // fitting diagnostics
    std::vector<LarsPathPoint> bic_path;
    int selected_index = 0;
    std::vector<std::string> notes;
    long long n_rows = 0;
    int n_scenarios = 0;

    int nonzero_count() const { return static_cast<int>((weights.array() != 0.0).count()); }
};

/// Builds the stacked Gram accumulators over (scenario, tau) rows and runs
/// LARS-BIC. set must be an unconditional (t0 = 0) training set.
RpModel fit_replicating_portfolio(const std::vector<Instrument>& universe,
                                  const EsgParams& params, const ScenarioSet& set,
                                  const CashflowMatrix& cashflows,
                                  const LarsConfig& lars = {}, bool physical_settlement = true,
                                  int threads = 0);

/// Closed-form portfolio value at grid time t given the state; account_t is
/// the absolute cash-account level (prices the intercept's per-period flow).
double rp_value(const RpModel& model, const EsgParams& params, double t, double r_t, double s_t,
                double account_t);

/// V1 of an outer scenario (t = 1 money).
double rp_value_t1(const RpModel& model, const EsgParams& params, const OuterState& outer);

/// CSV serialization: rows (instrument, weight) plus an intercept row.
void write_rp_csv(const std::string& path, const RpModel& model);
RpModel read_rp_csv(const std::string& path, const EsgParams& params);

}  // namespace caplab
