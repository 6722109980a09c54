#pragma once

#include "caplab/esg/params.hpp"

namespace caplab {

/// Forward par swap rate at t for an annual-fixed-leg swap over
/// (expiry, expiry + tenor], from the flat t=0 curve when t = 0.
double par_swap_rate(const EsgParams& p, double r_t, double t, double expiry, int tenor);

/// Value at t of the payer swap (receive float, pay fixed K) whose flows
/// settle annually over (expiry, expiry + tenor].
double swap_value(const EsgParams& p, double r_t, double t, double expiry, int tenor,
                  double strike_rate);

/// European swaption by Jamshidian's decomposition into zero-coupon-bond
/// options at the critical short rate. Annual fixed leg, unit notional.
/// Throws if the critical-rate solve fails to converge.
double swaption_price(const EsgParams& p, double r_t, double t, double expiry, int tenor,
                      double strike_rate, bool payer);

/// European equity option under the joint Hull-White / lognormal-equity
/// model: Black on the equity forward with total variance
/// sigma_S^2 (T-t) + Var[log deflator(t,T)] (independent drivers).
double equity_option_price(const EsgParams& p, double s_t, double r_t, double t, double T_mat,
                           double strike, bool call);

/// Option on a zero-coupon bond (expiry T0, bond maturity T1).
double zcb_option_price(const EsgParams& p, double r_t, double t, double T0, double T1,
                        double strike, bool call);

}  // namespace caplab
