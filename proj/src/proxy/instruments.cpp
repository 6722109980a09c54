#include "caplab/proxy/instruments.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "caplab/esg/hullwhite.hpp"
#include "caplab/esg/pricers.hpp"

namespace caplab {

std::string Instrument::label() const {
    char buf[96];
    switch (kind) {
        case InstrumentKind::Zcb:
            std::snprintf(buf, sizeof(buf), "zcb m=%d", maturity);
            break;
        case InstrumentKind::Cash:
            std::snprintf(buf, sizeof(buf), "cash");
            break;
        case InstrumentKind::Equity:
            std::snprintf(buf, sizeof(buf), "equity");
            break;
        case InstrumentKind::Call:
            std::snprintf(buf, sizeof(buf), "call e=%d k=%.17g", maturity, strike);
            break;
        case InstrumentKind::Put:
            std::snprintf(buf, sizeof(buf), "put e=%d k=%.17g", maturity, strike);
            break;
        case InstrumentKind::PayerSwaption:
            std::snprintf(buf, sizeof(buf), "payer_swaption e=%d tenor=%d k=%.17g", maturity,
                          tenor, strike);
            break;
        case InstrumentKind::ReceiverSwaption:
            std::snprintf(buf, sizeof(buf), "receiver_swaption e=%d tenor=%d k=%.17g", maturity,
                          tenor, strike);
            break;
    }
    return buf;
}

Instrument Instrument::parse(const std::string& label) {
    std::istringstream ss(label);
    std::string name;
    ss >> name;
    Instrument ins;
    auto value_of = [&](const std::string& token) {
        auto eq = token.find('=');
        if (eq == std::string::npos) throw std::runtime_error("bad instrument label: " + label);
        return token.substr(eq + 1);
    };
    std::string tok;
    auto read_fields = [&]() {
        while (ss >> tok) {
            if (tok.rfind("m=", 0) == 0 || tok.rfind("e=", 0) == 0)
                ins.maturity = std::stoi(value_of(tok));
            else if (tok.rfind("tenor=", 0) == 0)
                ins.tenor = std::stoi(value_of(tok));
            else if (tok.rfind("k=", 0) == 0)
                ins.strike = std::stod(value_of(tok));
            else
                throw std::runtime_error("bad instrument label: " + label);
        }
    };
    if (name == "zcb") ins.kind = InstrumentKind::Zcb;
    else if (name == "cash") ins.kind = InstrumentKind::Cash;
    else if (name == "equity") ins.kind = InstrumentKind::Equity;
    else if (name == "call") ins.kind = InstrumentKind::Call;
    else if (name == "put") ins.kind = InstrumentKind::Put;
    else if (name == "payer_swaption") ins.kind = InstrumentKind::PayerSwaption;
    else if (name == "receiver_swaption") ins.kind = InstrumentKind::ReceiverSwaption;
    else throw std::runtime_error("unknown instrument: " + label);
    read_fields();
    return ins;
}

UniverseConfig UniverseConfig::defaults(int horizon) {
    UniverseConfig cfg;
    for (int m = 1; m <= horizon; ++m) cfg.zcb_maturities.push_back(m);
    for (int e = 5; e <= horizon; e += 5) cfg.option_expiries.push_back(e);
    cfg.option_moneyness = {0.5, 0.75, 1.0, 1.25, 1.5};
    cfg.swaption_expiries = {5, 10, 20};
    cfg.swaption_tenors = {5, 10};
    return cfg;
}

std::vector<Instrument> build_universe(const UniverseConfig& cfg, const EsgParams& params) {
    std::vector<Instrument> u;
    for (int m : cfg.zcb_maturities) {
        if (m < 1 || m > params.horizon)
            throw std::invalid_argument("universe: zcb maturity outside the horizon");
        u.push_back({InstrumentKind::Zcb, m, 0.0, 0});
    }
    if (cfg.include_cash) u.push_back({InstrumentKind::Cash, 0, 0.0, 0});
    if (cfg.include_equity) u.push_back({InstrumentKind::Equity, 0, 0.0, 0});
    for (int e : cfg.option_expiries) {
        if (e < 1 || e > params.horizon)
            throw std::invalid_argument("universe: option expiry outside the horizon");
        const double fwd = params.initial_equity * std::exp(params.initial_rate * e);
        for (double m : cfg.option_moneyness) {
            if (!(m > 0.0)) throw std::invalid_argument("universe: moneyness must be > 0");
            u.push_back({InstrumentKind::Call, e, m * fwd, 0});
            u.push_back({InstrumentKind::Put, e, m * fwd, 0});
        }
    }
    for (int e : cfg.swaption_expiries)
        for (int n : cfg.swaption_tenors) {
            if (e + n > params.horizon)
                throw std::invalid_argument("universe: swaption extends past the horizon");
            const double atm = par_swap_rate(params, params.initial_rate, 0.0, e, n);
            u.push_back({InstrumentKind::PayerSwaption, e, atm, n});
            u.push_back({InstrumentKind::ReceiverSwaption, e, atm, n});
        }
    return u;
}

Eigen::MatrixXd swaption_exercise(const std::vector<Instrument>& universe,
                                  const EsgParams& params, const ScenarioSet& set) {
    Eigen::MatrixXd ex = Eigen::MatrixXd::Zero(set.n(), static_cast<int>(universe.size()));
    for (std::size_t k = 0; k < universe.size(); ++k) {
        const Instrument& ins = universe[k];
        if (ins.kind != InstrumentKind::PayerSwaption &&
            ins.kind != InstrumentKind::ReceiverSwaption)
            continue;
        const double w = ins.kind == InstrumentKind::PayerSwaption ? 1.0 : -1.0;
        for (int i = 0; i < set.n(); ++i) {
            const double sv = swap_value(params, set.r(i, ins.maturity), ins.maturity,
                                         ins.maturity, ins.tenor, ins.strike);
            ex(i, static_cast<int>(k)) = (w * sv > 0.0) ? 1.0 : 0.0;
        }
    }
    return ex;
}

void instrument_flows_at(const std::vector<Instrument>& universe, const EsgParams& params,
                         const ScenarioSet& set, const Eigen::MatrixXd& exercise, int tau,
                         bool physical_settlement, Eigen::MatrixXd& out) {
    const int n = set.n();
    const int p = static_cast<int>(universe.size());
    out.setZero(n, p);
    const int T = set.horizon();
    if (tau <= set.t0 || tau > T) throw std::invalid_argument("instrument_flows_at: tau out of range");
    for (int k = 0; k < p; ++k) {
        const Instrument& ins = universe[k];
        switch (ins.kind) {
            case InstrumentKind::Zcb:
                if (ins.maturity > T)
                    throw std::invalid_argument("instrument references time past the horizon");
                if (tau == ins.maturity)
                    for (int i = 0; i < n; ++i) out(i, k) = set.deflator(i, tau);
                break;
            case InstrumentKind::Cash:
                for (int i = 0; i < n; ++i) {
                    const double coupon = set.B(i, tau) / set.B(i, tau - 1) - 1.0;
                    out(i, k) = set.deflator(i, tau) * (coupon + (tau == T ? 1.0 : 0.0));
                }
                break;
            case InstrumentKind::Equity:
                if (tau == T)
                    for (int i = 0; i < n; ++i) out(i, k) = set.deflator(i, tau) * set.S(i, tau);
                break;
            case InstrumentKind::Call:
            case InstrumentKind::Put: {
                if (tau != ins.maturity) break;
                const double w = ins.kind == InstrumentKind::Call ? 1.0 : -1.0;
                for (int i = 0; i < n; ++i)
                    out(i, k) = set.deflator(i, tau) *
                                std::max(w * (set.S(i, tau) - ins.strike), 0.0);
                break;
            }
            case InstrumentKind::PayerSwaption:
            case InstrumentKind::ReceiverSwaption: {
                const double w = ins.kind == InstrumentKind::PayerSwaption ? 1.0 : -1.0;
                if (physical_settlement) {
                    if (tau <= ins.maturity || tau > ins.maturity + ins.tenor) break;
                    for (int i = 0; i < n; ++i) {
                        if (exercise(i, k) == 0.0) continue;
                        const double floating = set.B(i, tau) / set.B(i, tau - 1) - 1.0;
                        out(i, k) = set.deflator(i, tau) * w * (floating - ins.strike);
                    }
                } else if (tau == ins.maturity) {
                    for (int i = 0; i < n; ++i) {
                        const double sv = swap_value(params, set.r(i, tau), tau, tau, ins.tenor,
                                                     ins.strike);
                        out(i, k) = set.deflator(i, tau) * std::max(w * sv, 0.0);
                    }
                }
                break;
            }
        }
    }
}

Eigen::MatrixXd instrument_cashflow_matrix(const std::vector<Instrument>& universe,
                                           const EsgParams& params, const ScenarioSet& set,
                                           bool physical_settlement) {
    const int n = set.n();
    const int T = set.horizon();
    const int p = static_cast<int>(universe.size());
    const Eigen::MatrixXd exercise = swaption_exercise(universe, params, set);
    Eigen::MatrixXd a((T - set.t0) * n, p);
    Eigen::MatrixXd block;
    for (int tau = set.t0 + 1; tau <= T; ++tau) {
        instrument_flows_at(universe, params, set, exercise, tau, physical_settlement, block);
        a.middleRows(static_cast<long>(tau - set.t0 - 1) * n, n) = block;
    }
    return a;
}

double instrument_price(const Instrument& ins, const EsgParams& params, double t, double r_t,
                        double s_t, bool physical_settlement) {
    const int T = params.horizon;
    switch (ins.kind) {
        case InstrumentKind::Zcb:
            return t < ins.maturity ? zcb_price(params, r_t, t, ins.maturity) : 0.0;
        case InstrumentKind::Cash:
            return t < T ? 1.0 : 0.0;
        case InstrumentKind::Equity:
            return t < T ? s_t : 0.0;
        case InstrumentKind::Call:
            return t < ins.maturity
                       ? equity_option_price(params, s_t, r_t, t, ins.maturity, ins.strike, true)
                       : 0.0;
        case InstrumentKind::Put:
            return t < ins.maturity
                       ? equity_option_price(params, s_t, r_t, t, ins.maturity, ins.strike, false)
                       : 0.0;
        case InstrumentKind::PayerSwaption:
        case InstrumentKind::ReceiverSwaption: {
            const bool payer = ins.kind == InstrumentKind::PayerSwaption;
            if (t < ins.maturity || (physical_settlement && t == ins.maturity))
                return swaption_price(params, r_t, t, ins.maturity, ins.tenor, ins.strike, payer);
            throw std::logic_error("instrument_price: no pricer for a swaption past expiry");
        }
    }
    throw std::logic_error("instrument_price: unknown instrument kind");
}

}  // namespace caplab
