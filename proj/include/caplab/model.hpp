#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "caplab/esg/economy.hpp"
#include "caplab/mortality/leecarter.hpp"
#include "caplab/product/gmdb.hpp"

namespace caplab {

/// Everything the liability simulation depends on: the risk-neutral economy,
/// the stochastic life table and the product portfolio. The real-world
/// year-one measure equals the risk-neutral one.
struct ModelSpec {
    EsgParams esg;
    LeeCarterParams mortality;
    GmdbProduct product;

    static constexpr int kDims = 3;  // (rate, equity, mortality) drivers

    void validate() const {
        esg.validate();
        mortality.validate();
        product.validate(mortality.age_min, mortality.age_max, esg.horizon);
    }

    static ModelSpec defaults();
};

/// Time-1 state of one outer scenario: the year-one drivers, the economy and
/// period index they produce, and the portfolio evolved through year one.
struct OuterState {
    Eigen::VectorXd xi1;
    EconState econ;  // t0 = 1
    double kappa1 = 0.0;
    ProductState product;
    double cf1 = 0.0;  // year-one liability flow, deflated to t = 0
};

OuterState make_outer_state(const ModelSpec& model, const Eigen::VectorXd& xi1);

/// Outer state i of the stream identified by seed (deterministic per index).
OuterState outer_state_at(const ModelSpec& model, std::uint64_t seed, int index);

/// Unconditional full-horizon paths with their liability cash flows; the
/// training data of the regress-later methods.
struct PathData {
    DriverTensor drivers;
    ScenarioSet scenarios;
    MortalityPath mortality;
    CashflowMatrix cashflows;
};

PathData simulate_paths(const ModelSpec& model, int n_scenarios, std::uint64_t seed,
                        int threads = 0);

/// Deflated-to-t1 liability value of each inner continuation (tau >= 2).
Eigen::VectorXd conditional_path_values(const ModelSpec& model, const OuterState& outer,
                                        int n_inner, std::uint64_t seed, int threads = 0);

/// V1 of one outer state by conditional Monte Carlo: average over n_inner
/// risk-neutral continuations of the deflated-to-t1 liability flows at
/// tau >= 2.
double value_conditional_mc(const ModelSpec& model, const OuterState& outer, int n_inner,
                            std::uint64_t seed, int threads = 0);

}  // namespace caplab
