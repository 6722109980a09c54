#include "caplab/esg/hullwhite.hpp"

#include <cmath>
#include <stdexcept>

namespace caplab {

double hw_b(const EsgParams& p, double dt) {
    return (1.0 - std::exp(-p.mean_reversion * dt)) / p.mean_reversion;
}

double hw_alpha(const EsgParams& p, double t) {
    const double a = p.mean_reversion, s = p.rate_vol;
    const double e = 1.0 - std::exp(-a * t);
    return p.initial_rate + s * s / (2.0 * a * a) * e * e;
}

double hw_int_alpha(const EsgParams& p, double s, double t) {
    const double a = p.mean_reversion, sig = p.rate_vol;
    const double dt = t - s;
    const double term = dt + 2.0 / a * (std::exp(-a * t) - std::exp(-a * s)) +
                        1.0 / (2.0 * a) * (std::exp(-2.0 * a * s) - std::exp(-2.0 * a * t));
    return p.initial_rate * dt + sig * sig / (2.0 * a * a) * term;
}

double hw_log_a(const EsgParams& p, double t, double T) {
    const double a = p.mean_reversion, sig = p.rate_vol;
    const double b = hw_b(p, T - t);
    return -p.initial_rate * (T - t) + b * p.initial_rate -
           sig * sig / (4.0 * a) * b * b * (1.0 - std::exp(-2.0 * a * t));
}

double zcb_price(const EsgParams& p, double r_t, double t, double T_mat) {
    if (t > T_mat) throw std::invalid_argument("zcb_price: t > maturity");
    if (t == T_mat) return 1.0;
    return std::exp(hw_log_a(p, t, T_mat) - hw_b(p, T_mat - t) * r_t);
}

double hw_int_r_variance(const EsgParams& p, double dt) {
    const double a = p.mean_reversion, sig = p.rate_vol;
    const double b = hw_b(p, dt);
    return sig * sig / (a * a) * (dt - 2.0 * b + (1.0 - std::exp(-2.0 * a * dt)) / (2.0 * a));
}

double hw_step_residual_var(const EsgParams& p, double dt) {
    const double a = p.mean_reversion, sig = p.rate_vol;
    if (sig == 0.0) return 0.0;
    const double var_r = sig * sig * (1.0 - std::exp(-2.0 * a * dt)) / (2.0 * a);
    const double b = hw_b(p, dt);
    const double cov = sig * sig * b * b / 2.0;
    return hw_int_r_variance(p, dt) - cov * cov / var_r;
}

double hw_log_deflator_var(const EsgParams& p, double t, double T) {
    if (T <= t) return 0.0;
    const int n_steps = static_cast<int>(std::lround((T - t) / p.step));
    return hw_int_r_variance(p, T - t) - n_steps * hw_step_residual_var(p, p.step);
}

HwStepCoeffs hw_step_coeffs(const EsgParams& p, double s, double dt) {
    const double a = p.mean_reversion, sig = p.rate_vol;
    HwStepCoeffs c;
    c.decay = std::exp(-a * dt);
    c.alpha_s = hw_alpha(p, s);
    c.alpha_t = hw_alpha(p, s + dt);
    c.int_alpha = hw_int_alpha(p, s, s + dt);
    c.b_dt = hw_b(p, dt);
    const double var_r = sig * sig * (1.0 - std::exp(-2.0 * a * dt)) / (2.0 * a);
    c.sd_r = std::sqrt(var_r);
    if (sig == 0.0) {
        c.proj_slope = 0.0;
        c.half_res = 0.0;
    } else {
        const double cov = sig * sig * c.b_dt * c.b_dt / 2.0;
        c.proj_slope = cov / var_r;
        c.half_res = 0.5 * (hw_int_r_variance(p, dt) - cov * cov / var_r);
    }
    return c;
}

}  // namespace caplab
