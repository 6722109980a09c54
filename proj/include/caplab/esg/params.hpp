#pragma once

#include <stdexcept>

namespace caplab {

/// Hull-White / equity parameters of the risk-neutral economy. The initial
/// yield curve is flat at r0 (continuous compounding), time steps are annual.
struct EsgParams {
    double mean_reversion = 0.1;   // a, 1/years
    double rate_vol = 0.01;        // sigma_r, absolute per sqrt(year)
    double initial_rate = 0.02;    // r0
    double equity_vol = 0.2;       // sigma_S per sqrt(year)
    double initial_equity = 100.0; // S0
    int horizon = 40;              // T, years
    double step = 1.0;             // annual grid

    void validate() const {
        if (!(mean_reversion > 0.0)) throw std::invalid_argument("esg: mean_reversion must be > 0");
        if (rate_vol < 0.0) throw std::invalid_argument("esg: rate_vol must be >= 0");
        if (equity_vol < 0.0) throw std::invalid_argument("esg: equity_vol must be >= 0");
        if (!(initial_equity > 0.0)) throw std::invalid_argument("esg: initial_equity must be > 0");
        if (horizon < 1) throw std::invalid_argument("esg: horizon must be >= 1");
        if (!(step > 0.0)) throw std::invalid_argument("esg: step must be > 0");
    }
};

namespace driver_dim {
// Fixed dimension order of the Gaussian drivers.
inline constexpr int kRate = 0;
inline constexpr int kEquity = 1;
inline constexpr int kMortality = 2;
}  // namespace driver_dim

}  // namespace caplab
