#include "caplab/esg/economy.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "caplab/esg/hullwhite.hpp"
#include "caplab/io/csv.hpp"
#include "caplab/parallel.hpp"
#include "caplab/rng.hpp"

namespace caplab {

namespace {

ScenarioSet simulate_impl(const EsgParams& params, const DriverTensor& drivers, int t0,
                          double r_init, double s_init, double base_account, int threads) {
    params.validate();
    if (drivers.dims < 2)
        throw std::invalid_argument("simulate_economy: drivers must have >= 2 dimensions");
    const int n_steps = params.horizon - t0;
    if (drivers.steps < n_steps)
        throw std::invalid_argument("simulate_economy: drivers cover fewer steps than the horizon");

    std::vector<HwStepCoeffs> coeffs;
    coeffs.reserve(n_steps);
    for (int k = 0; k < n_steps; ++k)
        coeffs.push_back(hw_step_coeffs(params, (t0 + k) * params.step, params.step));

    const double eq_drift = -0.5 * params.equity_vol * params.equity_vol * params.step;
    const double eq_vol = params.equity_vol * std::sqrt(params.step);

    ScenarioSet set;
    set.params = params;
    set.t0 = t0;
    set.base_account = base_account;
    const int n = drivers.n_scenarios;
    set.short_rate.resize(n, n_steps + 1);
    set.account.resize(n, n_steps + 1);
    set.equity.resize(n, n_steps + 1);

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t si) {
        const int i = static_cast<int>(si);
        double r = r_init, b = 1.0, s = s_init;
        set.short_rate(i, 0) = r;
        set.account(i, 0) = b;
        set.equity(i, 0) = s;
        for (int k = 0; k < n_steps; ++k) {
            const HwStepCoeffs& c = coeffs[k];
            const double r_next = c.rate_mean(r) + c.sd_r * drivers.xi(i, k + 1, driver_dim::kRate);
            const double log_binc = c.log_account_increment(r, r_next);
            b *= std::exp(log_binc);
            s *= std::exp(log_binc + eq_drift + eq_vol * drivers.xi(i, k + 1, driver_dim::kEquity));
            r = r_next;
            set.short_rate(i, k + 1) = r;
            set.account(i, k + 1) = b;
            set.equity(i, k + 1) = s;
        }
    }, threads);
    return set;
}

}  // namespace

ScenarioSet simulate_economy(const EsgParams& params, const DriverTensor& drivers, int threads) {
    return simulate_impl(params, drivers, 0, params.initial_rate, params.initial_equity, 1.0,
                         threads);
}

ScenarioSet simulate_economy_from(const EsgParams& params, const DriverTensor& drivers,
                                  const EconState& state, int threads) {
    if (!(state.account > 0.0) || !(state.equity > 0.0))
        throw std::invalid_argument("condition_scenarios: state must provide positive B and S");
    const int t0 = static_cast<int>(std::lround(state.t0));
    return simulate_impl(params, drivers, t0, state.r, state.equity, state.account, threads);
}

ScenarioSet condition_scenarios(const EconState& state, const EsgParams& params, int n_inner,
                                std::uint64_t seed, int threads) {
    const int t0 = static_cast<int>(std::lround(state.t0));
    const int n_steps = params.horizon - t0;
    if (n_steps < 1) throw std::invalid_argument("condition_scenarios: nothing left to simulate");
    DriverTensor drivers = generate_drivers(n_inner, n_steps, 3, seed, threads);
    return simulate_economy_from(params, drivers, state, threads);
}

void write_scenario_csv(const std::string& path, const ScenarioSet& set,
                        const DriverTensor* drivers) {
    const int dims = drivers ? drivers->dims : 0;
    std::vector<std::string> header = {"scenario_id", "t", "r", "B", "S"};
    for (int d = 0; d < dims; ++d) header.push_back("xi_" + std::to_string(d));
    CsvWriter w(path, header);
    for (int i = 0; i < set.n(); ++i) {
        for (int t = set.t0; t <= set.horizon(); ++t) {
            w.field(static_cast<long long>(i));
            w.field(static_cast<long long>(t));
            w.field(set.r(i, t));
            w.field(set.B(i, t));
            w.field(set.S(i, t));
            for (int d = 0; d < dims; ++d)
                w.field(t == set.t0 ? 0.0 : drivers->xi(i, t - set.t0, d));
            w.end_row();
        }
    }
    w.close();
}

ScenarioCsv read_scenario_csv(const std::string& path, const EsgParams& params) {
    CsvTable table = read_csv(path);
    const int c_id = table.column("scenario_id");
    const int c_t = table.column("t");
    const int c_r = table.column("r");
    const int c_b = table.column("B");
    const int c_s = table.column("S");
    std::vector<int> xi_cols;
    for (int d = 0;; ++d) {
        std::string name = "xi_" + std::to_string(d);
        bool found = false;
        for (std::size_t i = 0; i < table.header.size(); ++i)
            if (table.header[i] == name) {
                xi_cols.push_back(static_cast<int>(i));
                found = true;
            }
        if (!found) break;
    }
    const int dims = static_cast<int>(xi_cols.size());
    int t0 = -1, t_max = -1, n = 0;
    for (const auto& row : table.rows) {
        int id = std::stoi(row[c_id]);
        int t = std::stoi(row[c_t]);
        n = std::max(n, id + 1);
        if (t0 < 0 || t < t0) t0 = t;
        t_max = std::max(t_max, t);
    }
    if (t_max != params.horizon)
        throw std::runtime_error("scenario csv horizon does not match the configuration");
    ScenarioCsv out;
    out.set.params = params;
    out.set.t0 = t0;
    const int cols = t_max - t0 + 1;
    out.set.short_rate.resize(n, cols);
    out.set.account.resize(n, cols);
    out.set.equity.resize(n, cols);
    out.drivers.n_scenarios = n;
    out.drivers.steps = cols - 1;
    out.drivers.dims = dims;
    out.drivers.values.resize(n, (cols - 1) * std::max(dims, 1));
    for (const auto& row : table.rows) {
        int id = std::stoi(row[c_id]);
        int t = std::stoi(row[c_t]);
        out.set.short_rate(id, t - t0) = std::stod(row[c_r]);
        out.set.account(id, t - t0) = std::stod(row[c_b]);
        out.set.equity(id, t - t0) = std::stod(row[c_s]);
        if (t > t0)
            for (int d = 0; d < dims; ++d)
                out.drivers.values(id, (t - t0 - 1) * dims + d) = std::stod(row[xi_cols[d]]);
    }
    return out;
}

}  // namespace caplab
