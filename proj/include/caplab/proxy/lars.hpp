#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace caplab {

/// LARS with the lasso modification, run on second-moment accumulators so the
/// design matrix never needs to be materialized. Columns are standardized to
/// zero mean and unit variance internally; the Bayesian information
/// criterion n log(RSS/n) + df log(n) picks the path point, df = number of
/// nonzero coefficients.

struct LarsConfig {
    int max_steps = 0;             // 0 = 8 * n_columns
    double rss_floor_rel = 1e-12;  // floor on RSS/TSS inside the BIC log
};

struct LarsPathPoint {
    double lambda = 0.0;  // max absolute correlation, i.e. the l1 penalty level
    double rss = 0.0;
    int df = 0;
    double bic = 0.0;
};

struct LarsResult {
    Eigen::VectorXd coefficients;  // original (de-standardized) scale
    double intercept = 0.0;
    int selected_index = 0;  // path point minimizing BIC
    std::vector<LarsPathPoint> path;
    std::vector<Eigen::VectorXd> path_coefficients;  // standardized scale
    std::vector<std::string> notes;                  // dropped collinear entrants etc.
    long long n_rows = 0;
};

/// Accumulator form: xtx = X'X, xty = X'y, col_sums = X'1, y_sum = y'1,
/// yty = y'y over n rows.
LarsResult fit_lars_bic_gram(const Eigen::MatrixXd& xtx, const Eigen::VectorXd& xty,
                             const Eigen::VectorXd& col_sums, double y_sum, double yty,
                             long long n, const LarsConfig& config = {});

/// Convenience wrapper over a dense design matrix.
LarsResult fit_lars_bic(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                        const LarsConfig& config = {});

}  // namespace caplab
