#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "caplab/esg/economy.hpp"
#include "caplab/esg/params.hpp"

namespace caplab {

enum class InstrumentKind { Zcb, Cash, Equity, Call, Put, PayerSwaption, ReceiverSwaption };

/// One instrument of the replicating universe. maturity is the flow time for
/// bonds and the expiry for options/swaptions; strike is a price level for
/// equity options and a rate for swaptions.
struct Instrument {
    InstrumentKind kind = InstrumentKind::Zcb;
    int maturity = 0;
    double strike = 0.0;
    int tenor = 0;

    std::string label() const;
    static Instrument parse(const std::string& label);
};

struct UniverseConfig {
    std::vector<int> zcb_maturities;        // default 1..horizon
    std::vector<int> option_expiries;       // default {5,10,...,40}
    std::vector<double> option_moneyness;   // strike = m * equity forward
    std::vector<int> swaption_expiries;     // default {5,10,20}
    std::vector<int> swaption_tenors;       // default {5,10}
    bool include_cash = true;
    bool include_equity = true;
    bool physical_settlement = true;  // swaptions settle into the swap flows

    static UniverseConfig defaults(int horizon);
};

/// Enumerates the universe with ATM-anchored strikes off the flat t=0 curve.
std::vector<Instrument> build_universe(const UniverseConfig& cfg, const EsgParams& params);

/// Per-scenario swaption exercise indicators (intrinsic decision at expiry
/// using the closed-form swap value). Columns align with the universe; only
/// swaption columns are meaningful.
Eigen::MatrixXd swaption_exercise(const std::vector<Instrument>& universe,
                                  const EsgParams& params, const ScenarioSet& set);

/// Deflated instrument cash flows at time tau, one row per scenario, one
/// column per instrument.
void instrument_flows_at(const std::vector<Instrument>& universe, const EsgParams& params,
                         const ScenarioSet& set, const Eigen::MatrixXd& exercise, int tau,
                         bool physical_settlement, Eigen::MatrixXd& out);

/// Full stacked design matrix A[(i,tau), k]: tau-major blocks of n rows each,
/// tau = 1..horizon. Intended for tests and small fits; large fits accumulate
/// Gram blocks instead.
Eigen::MatrixXd instrument_cashflow_matrix(const std::vector<Instrument>& universe,
                                           const EsgParams& params, const ScenarioSet& set,
                                           bool physical_settlement = true);

/// Time-t price of the flows strictly after t. Throws when no closed form is
/// available (e.g. a swaption already past its expiry).
double instrument_price(const Instrument& instr, const EsgParams& params, double t, double r_t,
                        double s_t, bool physical_settlement = true);

}  // namespace caplab
