#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace caplab {

/// Limited-memory BFGS with a strong-Wolfe line search. Deterministic: the
/// same objective, start point and options reproduce the same iterates.
struct LbfgsOptions {
    int max_iterations = 500;
    double gradient_tol = 1e-8;  // infinity norm of the gradient
    double f_rel_tol = 1e-10;    // relative decrease per iteration
    int history = 10;
    int max_line_search = 40;
};

struct LbfgsReport {
    int iterations = 0;
    double final_loss = 0.0;
    double grad_norm = 0.0;
    bool converged = false;
    std::string stop_reason;
};

namespace detail {

template <class F>
bool wolfe_line_search(F& func, const Eigen::VectorXd& x0, double f0, const Eigen::VectorXd& g0,
                       const Eigen::VectorXd& p, Eigen::VectorXd& x, double& f,
                       Eigen::VectorXd& g, int max_iters) {
    const double c1 = 1e-4, c2 = 0.9;
    const double dphi0 = g0.dot(p);
    if (!(dphi0 < 0.0)) return false;

    auto eval = [&](double a, double& phi, double& dphi) {
        x = x0 + a * p;
        phi = func(x, g);
        if (!std::isfinite(phi)) phi = std::numeric_limits<double>::infinity();
        dphi = g.dot(p);
    };

    auto zoom = [&](double lo, double phi_lo, double dphi_lo, double hi, double phi_hi) -> bool {
        double phi = std::numeric_limits<double>::infinity(), dphi = 0.0;
        for (int it = 0; it < max_iters; ++it) {
            // Safeguarded quadratic interpolation between lo and hi.
            double a;
            const double d = hi - lo;
            if (std::isfinite(phi_hi) && dphi_lo != 0.0) {
                a = lo - 0.5 * dphi_lo * d * d / (phi_hi - phi_lo - dphi_lo * d);
                const double margin = 0.1 * std::abs(d);
                if (!std::isfinite(a) || a <= std::min(lo, hi) + margin ||
                    a >= std::max(lo, hi) - margin)
                    a = 0.5 * (lo + hi);
            } else {
                a = 0.5 * (lo + hi);
            }
            eval(a, phi, dphi);
            if (phi > f0 + c1 * a * dphi0 || phi >= phi_lo) {
                hi = a;
                phi_hi = phi;
            } else {
                if (std::abs(dphi) <= -c2 * dphi0) {
                    f = phi;
                    return true;
                }
                if (dphi * (hi - lo) >= 0.0) {
                    hi = lo;
                    phi_hi = phi_lo;
                }
                lo = a;
                phi_lo = phi;
                dphi_lo = dphi;
            }
            if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
        }
        if (std::isfinite(phi) && phi < f0) {  // accept the best point found
            f = phi;
            return true;
        }
        return false;
    };

    double a_prev = 0.0, phi_prev = f0, dphi_prev = dphi0;
    double a = 1.0;
    double phi, dphi;
    for (int it = 0; it < max_iters; ++it) {
        eval(a, phi, dphi);
        if (phi > f0 + c1 * a * dphi0 || (it > 0 && phi >= phi_prev))
            return zoom(a_prev, phi_prev, dphi_prev, a, phi);
        if (std::abs(dphi) <= -c2 * dphi0) {
            f = phi;
            return true;
        }
        if (dphi >= 0.0) return zoom(a, phi, dphi, a_prev, phi_prev);
        a_prev = a;
        phi_prev = phi;
        dphi_prev = dphi;
        a = std::min(2.0 * a, 1e10);
    }
    return false;
}

}  // namespace detail

/// func(x, grad) -> loss, filling grad. x holds the start point and receives
/// the minimizer. Throws on a non-finite loss at the current iterate.
template <class F>
LbfgsReport lbfgs_minimize(F&& func, Eigen::VectorXd& x, const LbfgsOptions& opt = {}) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd g(n);
    double f = func(x, g);
    if (!std::isfinite(f))
        throw std::runtime_error("lbfgs: non-finite loss at iteration 0");

    std::vector<Eigen::VectorXd> s_hist, y_hist;
    std::vector<double> rho_hist;
    Eigen::VectorXd x_new(n), g_new(n), q(n), p(n);

    LbfgsReport rep;
    rep.final_loss = f;
    rep.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (rep.grad_norm <= opt.gradient_tol) {
        rep.converged = true;
        rep.stop_reason = "gradient below tolerance at start";
        return rep;
    }

    double gamma = 1.0;
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        // Two-loop recursion.
        q = -g;
        const int m = static_cast<int>(s_hist.size());
        std::vector<double> alpha(m);
        for (int i = m - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        p = gamma * q;
        for (int i = 0; i < m; ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(p);
            p += (alpha[i] - beta) * s_hist[i];
        }
        if (!(g.dot(p) < 0.0)) {  // fall back to steepest descent
            p = -g;
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        double f_new = f;
        if (!detail::wolfe_line_search(func, x, f, g, p, x_new, f_new, g_new,
                                       opt.max_line_search)) {
            rep.stop_reason = "line search failed at iteration " + std::to_string(iter);
            break;
        }
        if (!std::isfinite(f_new))
            throw std::runtime_error("lbfgs: non-finite loss at iteration " +
                                     std::to_string(iter));

        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd yv = g_new - g;
        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(yv);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opt.history) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
            gamma = sy / yv.squaredNorm();
        }

        const double f_prev = f;
        x = x_new;
        g = g_new;
        f = f_new;
        rep.iterations = iter + 1;
        rep.grad_norm = g.lpNorm<Eigen::Infinity>();
        if (rep.grad_norm <= opt.gradient_tol) {
            rep.converged = true;
            rep.stop_reason = "gradient below tolerance";
            break;
        }
        if (f_prev - f <= opt.f_rel_tol * std::max(std::abs(f_prev), std::abs(f))) {
            rep.converged = true;
            rep.stop_reason = "loss decrease below tolerance";
            break;
        }
    }
    if (rep.stop_reason.empty()) rep.stop_reason = "max iterations";
    rep.final_loss = f;
    return rep;
}

}  // namespace caplab
