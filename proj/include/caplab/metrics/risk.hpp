#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace caplab {

enum class Tail { Left, Right };

/// Order-statistic VaR with the ceil(alpha n) convention, returned as a
/// positive capital number: left tail -(k-th smallest), right tail the k-th
/// largest. Throws if fewer than 1/alpha samples are supplied.
double empirical_var(const Eigen::VectorXd& samples, double alpha, Tail tail);

/// Mean of the ceil(alpha n) worst observations on the requested tail, sign
/// convention matching empirical_var.
double empirical_es(const Eigen::VectorXd& samples, double alpha, Tail tail);

/// Subtracts the sample mean (exactly idempotent).
Eigen::VectorXd mean_center(const Eigen::VectorXd& samples);

/// Mean absolute percentage error of the estimates against a nonzero
/// benchmark value.
double mape(const Eigen::VectorXd& estimates, double benchmark);

/// Risk statistics of a V1 sample set. Tail metrics are mean-centred and
/// expressed as tail value minus mean, so left-tail entries are <= 0.
struct RiskReport {
    double mean = 0.0;
    double left_var = 0.0;
    double left_es = 0.0;
    double right_var = 0.0;
    double right_es = 0.0;
    double alpha = 0.01;
    long long n_samples = 0;

    /// Metric order used in every table: left ES, left VaR, mean, right VaR,
    /// right ES.
    static const std::vector<std::string>& metric_names();
    double metric(int k) const;
};

RiskReport make_risk_report(const Eigen::VectorXd& samples, double alpha = 0.01);

}  // namespace caplab
