#include "caplab/metrics/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace caplab {

namespace {

std::vector<double> sorted_checked(const Eigen::VectorXd& samples, double alpha) {
    if (samples.size() == 0) throw std::invalid_argument("risk: empty sample set");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("risk: alpha must be in (0,1)");
    if (static_cast<double>(samples.size()) * alpha < 1.0)
        throw std::invalid_argument("risk: too few samples for the requested alpha");
    std::vector<double> s(samples.data(), samples.data() + samples.size());
    std::sort(s.begin(), s.end());
    return s;
}

std::size_t tail_count(std::size_t n, double alpha) {
    return static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
}

}  // namespace

double empirical_var(const Eigen::VectorXd& samples, double alpha, Tail tail) {
    const auto s = sorted_checked(samples, alpha);
    const std::size_t m = tail_count(s.size(), alpha);
    return tail == Tail::Left ? -s[m - 1] : s[s.size() - m];
}

double empirical_es(const Eigen::VectorXd& samples, double alpha, Tail tail) {
    const auto s = sorted_checked(samples, alpha);
    const std::size_t m = tail_count(s.size(), alpha);
    double acc = 0.0;
    if (tail == Tail::Left) {
        for (std::size_t i = 0; i < m; ++i) acc += s[i];
        return -acc / static_cast<double>(m);
    }
    for (std::size_t i = s.size() - m; i < s.size(); ++i) acc += s[i];
    return acc / static_cast<double>(m);
}

Eigen::VectorXd mean_center(const Eigen::VectorXd& samples) {
    if (samples.size() == 0) throw std::invalid_argument("mean_center: empty input");
    return samples.array() - samples.mean();
}

double mape(const Eigen::VectorXd& estimates, double benchmark) {
    if (benchmark == 0.0) throw std::invalid_argument("mape: zero benchmark");
    if (estimates.size() == 0) throw std::invalid_argument("mape: empty estimates");
    return (estimates.array() / benchmark - 1.0).abs().mean();
}

const std::vector<std::string>& RiskReport::metric_names() {
    static const std::vector<std::string> names = {"left_es", "left_var", "mean", "right_var",
                                                   "right_es"};
    return names;
}

double RiskReport::metric(int k) const {
    switch (k) {
        case 0: return left_es;
        case 1: return left_var;
        case 2: return mean;
        case 3: return right_var;
        case 4: return right_es;
        default: throw std::out_of_range("RiskReport::metric");
    }
}

RiskReport make_risk_report(const Eigen::VectorXd& samples, double alpha) {
    RiskReport r;
    r.alpha = alpha;
    r.n_samples = samples.size();
    r.mean = samples.mean();
    const Eigen::VectorXd centered = mean_center(samples);
    r.left_var = -empirical_var(centered, alpha, Tail::Left);
    r.left_es = -empirical_es(centered, alpha, Tail::Left);
    r.right_var = empirical_var(centered, alpha, Tail::Right);
    r.right_es = empirical_es(centered, alpha, Tail::Right);
    return r;
}

}  // namespace caplab
