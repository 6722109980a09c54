#include "caplab/esg/pricers.hpp"

#include <cmath>
#include <stdexcept>

#include "caplab/esg/hullwhite.hpp"
#include "caplab/math/normal.hpp"

namespace caplab {

double par_swap_rate(const EsgParams& p, double r_t, double t, double expiry, int tenor) {
    double annuity = 0.0;
    for (int i = 1; i <= tenor; ++i) annuity += zcb_price(p, r_t, t, expiry + i);
    return (zcb_price(p, r_t, t, expiry) - zcb_price(p, r_t, t, expiry + tenor)) / annuity;
}

double swap_value(const EsgParams& p, double r_t, double t, double expiry, int tenor,
                  double strike_rate) {
    double annuity = 0.0;
    for (int i = 1; i <= tenor; ++i) annuity += zcb_price(p, r_t, t, expiry + i);
    return zcb_price(p, r_t, t, expiry) - zcb_price(p, r_t, t, expiry + tenor) -
           strike_rate * annuity;
}

double zcb_option_price(const EsgParams& p, double r_t, double t, double T0, double T1,
                        double strike, bool call) {
    if (!(strike > 0.0)) throw std::invalid_argument("zcb_option_price: strike must be > 0");
    const double p0 = zcb_price(p, r_t, t, T0);
    const double p1 = zcb_price(p, r_t, t, T1);
    const double a = p.mean_reversion, sig = p.rate_vol;
    const double sp = sig * std::sqrt((1.0 - std::exp(-2.0 * a * (T0 - t))) / (2.0 * a)) *
                      hw_b(p, T1 - T0);
    const double w = call ? 1.0 : -1.0;
    if (sp <= 0.0) return std::max(w * (p1 - strike * p0), 0.0);
    const double h = std::log(p1 / (p0 * strike)) / sp + 0.5 * sp;
    return w * (p1 * norm_cdf(w * h) - strike * p0 * norm_cdf(w * (h - sp)));
}

double swaption_price(const EsgParams& p, double r_t, double t, double expiry, int tenor,
                      double strike_rate, bool payer) {
    if (t > expiry) throw std::invalid_argument("swaption_price: t > expiry");
    if (tenor < 1) throw std::invalid_argument("swaption_price: tenor must be >= 1 year");
    if (expiry + tenor > p.horizon + 1e-9)
        throw std::invalid_argument("swaption_price: swap extends past the horizon");
    const double w = payer ? 1.0 : -1.0;

    if (p.rate_vol == 0.0 || t == expiry)
        return std::max(w * swap_value(p, r_t, t, expiry, tenor, strike_rate), 0.0);

    // Critical short rate: coupon bond (coupons K, principal 1) at par. The
    // bond value is strictly decreasing in r, so bracket and bisect.
    auto coupon_bond = [&](double r) {
        double v = 0.0;
        for (int i = 1; i <= tenor; ++i) {
            double c = (i == tenor) ? 1.0 + strike_rate : strike_rate;
            v += c * zcb_price(p, r, expiry, expiry + i);
        }
        return v;
    };
    double lo = p.initial_rate, hi = p.initial_rate;
    double width = 0.1;
    for (int k = 0; k < 80 && coupon_bond(lo) < 1.0; ++k) { lo -= width; width *= 2.0; }
    width = 0.1;
    for (int k = 0; k < 80 && coupon_bond(hi) > 1.0; ++k) { hi += width; width *= 2.0; }
    if (coupon_bond(lo) < 1.0 || coupon_bond(hi) > 1.0)
        throw std::runtime_error("swaption_price: critical-rate bracket not found");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double v = coupon_bond(mid);
        if (v > 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-10 * std::max(1.0, std::abs(mid))) break;
    }
    if (hi - lo > 1e-10 * std::max(1.0, std::abs(mid)))
        throw std::runtime_error("swaption_price: critical-rate solve did not converge");
    const double r_star = 0.5 * (lo + hi);

    // Payer swaption = basket of puts on the zero-coupon bonds struck at their
    // critical-rate prices; receiver = basket of calls.
    double price = 0.0;
    for (int i = 1; i <= tenor; ++i) {
        const double c = (i == tenor) ? 1.0 + strike_rate : strike_rate;
        const double k_i = zcb_price(p, r_star, expiry, expiry + i);
        price += c * zcb_option_price(p, r_t, t, expiry, expiry + i, k_i, !payer);
    }
    return price;
}

double equity_option_price(const EsgParams& p, double s_t, double r_t, double t, double T_mat,
                           double strike, bool call) {
    if (t > T_mat) throw std::invalid_argument("equity_option_price: t > maturity");
    if (!(strike > 0.0)) throw std::invalid_argument("equity_option_price: strike must be > 0");
    const double w = call ? 1.0 : -1.0;
    const double df = zcb_price(p, r_t, t, T_mat);
    const double fwd = s_t / df;
    if (t == T_mat) return std::max(w * (s_t - strike), 0.0);
    const double var = p.equity_vol * p.equity_vol * (T_mat - t) + hw_log_deflator_var(p, t, T_mat);
    if (var <= 0.0) return df * std::max(w * (fwd - strike), 0.0);
    const double v = std::sqrt(var);
    const double d1 = std::log(fwd / strike) / v + 0.5 * v;
    const double d2 = d1 - v;
    return df * w * (fwd * norm_cdf(w * d1) - strike * norm_cdf(w * d2));
}

}  // namespace caplab
