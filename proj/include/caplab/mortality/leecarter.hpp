#pragma once

#include <Eigen/Dense>
#include <string>

#include "caplab/esg/drivers.hpp"

namespace caplab {

/// Lee-Carter stochastic mortality: log m(x,t) = a_x + b_x kappa_t with
/// kappa a random walk with drift.
struct LeeCarterParams {
    int age_min = 30;
    int age_max = 110;
    Eigen::VectorXd a;  // log-mortality level per age
    Eigen::VectorXd b;  // age sensitivity
    double drift = -0.365;
    double sigma_k = 0.6;
    double kappa0 = 0.0;

    int n_ages() const { return age_max - age_min + 1; }
    void validate() const;

    /// Illustrative defaults: Gompertz level log m = -9.5 + 0.085 x and a
    /// uniform age sensitivity.
    static LeeCarterParams defaults();
};

/// One-year death probability at age x given the period index kappa,
/// q = 1 - exp(-m) with m = exp(a_x + b_x kappa), clamped to [0,1].
double lee_carter_q(const LeeCarterParams& params, int x, double kappa);

struct MortalityPath {
    LeeCarterParams params;
    int t0 = 0;
    Eigen::MatrixXd kappa;  // n x (horizon - t0 + 1); column 0 = kappa at t0

    int n() const { return static_cast<int>(kappa.rows()); }
    double kappa_at(int i, int t) const { return kappa(i, t - t0); }
    /// One-year death probability for age x over year t (exposure year
    /// (t-1, t]), from the period index kappa_t.
    double q(int i, int x, int t) const;
};

/// Simulates kappa paths over steps 1..horizon starting at params.kappa0.
MortalityPath simulate_mortality(const LeeCarterParams& params, const DriverTensor& drivers,
                                 int dim, int horizon, int threads = 0);
/// Conditional continuation: kappa starts at kappa_init at time t0.
MortalityPath simulate_mortality_from(const LeeCarterParams& params, const DriverTensor& drivers,
                                      int dim, int horizon, int t0, double kappa_init,
                                      int threads = 0);

/// Age table CSV with columns x, a_x, b_x. Scalar dynamics stay in the main
/// config.
void write_mortality_table_csv(const std::string& path, const LeeCarterParams& params);
LeeCarterParams read_mortality_table_csv(const std::string& path, const LeeCarterParams& dynamics);

}  // namespace caplab
