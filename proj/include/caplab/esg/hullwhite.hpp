#pragma once

#include "caplab/esg/params.hpp"

namespace caplab {

// One-factor Hull-White fitted to a flat initial curve at r0, simulated with
// the exact annual-step transition. The cash account uses the conditional
// mean of the integrated short rate given the step endpoints plus a
// deterministic convexity term, which keeps E_t[deflator] equal to the
// closed-form bond price on the annual grid.

/// B(dt) = (1 - exp(-a dt)) / a
double hw_b(const EsgParams& p, double dt);

/// alpha(t) = f(0,t) + sigma^2/(2a^2) (1 - e^{-at})^2 with flat forward f = r0.
double hw_alpha(const EsgParams& p, double t);

/// Integral of alpha over [s, t].
double hw_int_alpha(const EsgParams& p, double s, double t);

/// log A(t,T) of the affine bond price P(t,T) = A e^{-B r_t}.
double hw_log_a(const EsgParams& p, double t, double T);

/// Closed-form zero-coupon bond price P(t, T_mat) given the short rate at t.
/// Throws if t > T_mat.
double zcb_price(const EsgParams& p, double r_t, double t, double T_mat);

/// Var[int_t^T r du | r_t] (equals the integrated squared bond volatility).
double hw_int_r_variance(const EsgParams& p, double dt);

/// Variance of the integrated short rate over one step not explained by the
/// step endpoints.
double hw_step_residual_var(const EsgParams& p, double dt);

/// Variance of the log deflator between grid times t and T as the simulation
/// produces it (annual steps, endpoint-conditional integral).
double hw_log_deflator_var(const EsgParams& p, double t, double T);

/// Precomputed coefficients of the exact transition over [s, s+dt].
struct HwStepCoeffs {
    double decay;       // e^{-a dt}
    double alpha_s;     // alpha(s)
    double alpha_t;     // alpha(s+dt)
    double int_alpha;   // integral of alpha over the step
    double b_dt;        // B(dt)
    double sd_r;        // stdev of r_{s+dt} | r_s
    double proj_slope;  // cov(Y, r_end) / var(r_end)
    double half_res;    // half the residual variance of Y given endpoints

    double rate_mean(double r_s) const { return alpha_t + decay * (r_s - alpha_s); }
    /// log increment of the cash account given both endpoints.
    double log_account_increment(double r_s, double r_end) const {
        double y_mean = b_dt * (r_s - alpha_s) + int_alpha;
        return y_mean + proj_slope * (r_end - rate_mean(r_s)) - half_res;
    }
};

HwStepCoeffs hw_step_coeffs(const EsgParams& p, double s, double dt);

}  // namespace caplab
