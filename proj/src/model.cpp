#include "caplab/model.hpp"

#include <cmath>
#include <stdexcept>

#include "caplab/esg/hullwhite.hpp"
#include "caplab/rng.hpp"

namespace caplab {

ModelSpec ModelSpec::defaults() {
    ModelSpec m;
    m.mortality = LeeCarterParams::defaults();
    m.product = GmdbProduct::defaults();
    return m;
}

OuterState make_outer_state(const ModelSpec& model, const Eigen::VectorXd& xi1) {
    if (xi1.size() < ModelSpec::kDims)
        throw std::invalid_argument("make_outer_state: missing driver components");
    const EsgParams& p = model.esg;
    const HwStepCoeffs c = hw_step_coeffs(p, 0.0, p.step);

    OuterState o;
    o.xi1 = xi1.head(ModelSpec::kDims);
    const double r1 = c.rate_mean(p.initial_rate) + c.sd_r * xi1(driver_dim::kRate);
    const double log_b = c.log_account_increment(p.initial_rate, r1);
    const double b1 = std::exp(log_b);
    const double s1 =
        p.initial_equity * std::exp(log_b - 0.5 * p.equity_vol * p.equity_vol * p.step +
                                    p.equity_vol * std::sqrt(p.step) * xi1(driver_dim::kEquity));
    o.econ = EconState{1.0, r1, b1, s1};
    o.kappa1 = model.mortality.kappa0 + model.mortality.drift +
               model.mortality.sigma_k * xi1(driver_dim::kMortality);

    o.product = initial_state(model.product);
    auto q = [&](int age, int) { return lee_carter_q(model.mortality, age, o.kappa1); };
    const double paid =
        project_year(model.product, o.product, s1 / p.initial_equity, b1, q, p.horizon == 1);
    o.cf1 = -paid / b1;
    return o;
}

OuterState outer_state_at(const ModelSpec& model, std::uint64_t seed, int index) {
    Eigen::VectorXd xi1 =
        driver_row(index, 1, ModelSpec::kDims, substream_seed(seed, stream::kOuter));
    return make_outer_state(model, xi1);
}

PathData simulate_paths(const ModelSpec& model, int n_scenarios, std::uint64_t seed,
                        int threads) {
    model.validate();
    PathData d;
    d.drivers = generate_drivers(n_scenarios, model.esg.horizon, ModelSpec::kDims, seed, threads);
    d.scenarios = simulate_economy(model.esg, d.drivers, threads);
    d.mortality = simulate_mortality(model.mortality, d.drivers, driver_dim::kMortality,
                                     model.esg.horizon, threads);
    d.cashflows = build_cashflow_matrix(model.product, d.scenarios, d.mortality, threads);
    return d;
}

Eigen::VectorXd conditional_path_values(const ModelSpec& model, const OuterState& outer,
                                        int n_inner, std::uint64_t seed, int threads) {
    if (n_inner < 1) throw std::invalid_argument("value_conditional_mc: n_inner must be >= 1");
    const int horizon = model.esg.horizon;
    if (horizon < 2) return Eigen::VectorXd::Zero(n_inner);
    DriverTensor drivers =
        generate_drivers(n_inner, horizon - 1, ModelSpec::kDims, seed, threads);
    ScenarioSet inner = simulate_economy_from(model.esg, drivers, outer.econ, threads);
    MortalityPath mort = simulate_mortality_from(model.mortality, drivers, driver_dim::kMortality,
                                                 horizon, 1, outer.kappa1, threads);
    Eigen::VectorXd values(n_inner);
    for (int j = 0; j < n_inner; ++j) {
        ProductState st = outer.product;
        values(j) = project_cashflows(model.product, st, inner, j, mort).sum();
    }
    return values;
}

double value_conditional_mc(const ModelSpec& model, const OuterState& outer, int n_inner,
                            std::uint64_t seed, int threads) {
    return conditional_path_values(model, outer, n_inner, seed, threads).mean();
}

}  // namespace caplab
