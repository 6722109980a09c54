#include "caplab/proxy/rp.hpp"

#include <stdexcept>

#include "caplab/io/csv.hpp"
#include "caplab/parallel.hpp"

namespace caplab {

RpModel fit_replicating_portfolio(const std::vector<Instrument>& universe,
                                  const EsgParams& params, const ScenarioSet& set,
                                  const CashflowMatrix& cashflows, const LarsConfig& lars,
                                  bool physical_settlement, int threads) {
    if (set.t0 != 0) throw std::invalid_argument("rp fit: training set must start at t = 0");
    if (cashflows.n() != set.n()) throw std::invalid_argument("rp fit: row mismatch");
    const int T = set.horizon();
    const int p = static_cast<int>(universe.size());
    const Eigen::MatrixXd exercise = swaption_exercise(universe, params, set);

    // Accumulate X'X, X'y, column sums per tau block; reduce in tau order so
    // the result does not depend on the thread count.
    std::vector<Eigen::MatrixXd> xtx(T);
    std::vector<Eigen::VectorXd> xty(T), csum(T);
    std::vector<double> ysum(T), yty(T);
    parallel_for(static_cast<std::size_t>(T), [&](std::size_t k) {
        const int tau = static_cast<int>(k) + 1;
        Eigen::MatrixXd block;
        instrument_flows_at(universe, params, set, exercise, tau, physical_settlement, block);
        const Eigen::VectorXd y = cashflows.cf.col(tau - 1);
        xtx[k] = block.transpose() * block;
        xty[k] = block.transpose() * y;
        csum[k] = block.colwise().sum();
        ysum[k] = y.sum();
        yty[k] = y.squaredNorm();
    }, threads, 1);

    Eigen::MatrixXd gx = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd gy = Eigen::VectorXd::Zero(p), gc = Eigen::VectorXd::Zero(p);
    double sy = 0.0, syy = 0.0;
    for (int k = 0; k < T; ++k) {
        gx += xtx[k];
        gy += xty[k];
        gc += csum[k];
        sy += ysum[k];
        syy += yty[k];
    }
    const long long n_rows = static_cast<long long>(set.n()) * T;
    LarsResult fit = fit_lars_bic_gram(gx, gy, gc, sy, syy, n_rows, lars);

    RpModel model;
    model.instruments = universe;
    model.weights = fit.coefficients;
    model.intercept = fit.intercept;
    model.horizon = T;
    model.physical_settlement = physical_settlement;
    model.bic_path = fit.path;
    model.selected_index = fit.selected_index;
    model.notes = fit.notes;
    model.n_rows = n_rows;
    model.n_scenarios = set.n();
    return model;
}

double rp_value(const RpModel& model, const EsgParams& params, double t, double r_t, double s_t,
                double account_t) {
    double v = 0.0;
    for (std::size_t k = 0; k < model.instruments.size(); ++k) {
        const double w = model.weights(static_cast<int>(k));
        if (w == 0.0) continue;
        v += w * instrument_price(model.instruments[k], params, t, r_t, s_t,
                                  model.physical_settlement);
    }
    // The intercept is a constant deflated flow per remaining period; its
    // time-t value undoes the deflation with the account level.
    v += model.intercept * (model.horizon - t) * account_t;
    return v;
}

double rp_value_t1(const RpModel& model, const EsgParams& params, const OuterState& outer) {
    return rp_value(model, params, 1.0, outer.econ.r, outer.econ.equity, outer.econ.account);
}

void write_rp_csv(const std::string& path, const RpModel& model) {
    CsvWriter w(path, {"instrument", "weight"});
    w.field(std::string("__intercept__"));
    w.field(model.intercept);
    w.end_row();
    w.field(std::string("__horizon__"));
    w.field(static_cast<long long>(model.horizon));
    w.end_row();
    w.field(std::string("__physical_settlement__"));
    w.field(static_cast<long long>(model.physical_settlement ? 1 : 0));
    w.end_row();
    for (std::size_t k = 0; k < model.instruments.size(); ++k) {
        w.field(model.instruments[k].label());
        w.field(model.weights(static_cast<int>(k)));
        w.end_row();
    }
    w.close();
}

RpModel read_rp_csv(const std::string& path, const EsgParams& params) {
    CsvTable table = read_csv(path);
    const int ci = table.column("instrument");
    const int cw = table.column("weight");
    RpModel model;
    model.horizon = params.horizon;
    std::vector<double> weights;
    for (const auto& row : table.rows) {
        const std::string& name = row[ci];
        if (name == "__intercept__") {
            model.intercept = std::stod(row[cw]);
        } else if (name == "__horizon__") {
            model.horizon = std::stoi(row[cw]);
        } else if (name == "__physical_settlement__") {
            model.physical_settlement = std::stoi(row[cw]) != 0;
        } else {
            model.instruments.push_back(Instrument::parse(name));
            weights.push_back(std::stod(row[cw]));
        }
    }
    model.weights = Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<long>(weights.size()));
    return model;
}

}  // namespace caplab
