#include "caplab/proxy/lars.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace caplab {

namespace {

double bic_of(double rss, double tss, long long n, int df, double floor_rel) {
    const double floored = std::max(rss, floor_rel * tss + 1e-300);
    return static_cast<double>(n) * std::log(floored / static_cast<double>(n)) +
           df * std::log(static_cast<double>(n));
}

}  // namespace

LarsResult fit_lars_bic_gram(const Eigen::MatrixXd& xtx, const Eigen::VectorXd& xty,
                             const Eigen::VectorXd& col_sums, double y_sum, double yty,
                             long long n, const LarsConfig& config) {
    const int p = static_cast<int>(xtx.rows());
    if (xtx.cols() != p || xty.size() != p || col_sums.size() != p)
        throw std::invalid_argument("lars: accumulator shapes disagree");
    if (n < 2) throw std::invalid_argument("lars: need at least two rows");

    LarsResult res;
    res.n_rows = n;
    const double nn = static_cast<double>(n);
    const double y_mean = y_sum / nn;

    // Standardize: z_j = (x_j - mean_j) / sd_j against centered y.
    Eigen::VectorXd mean = col_sums / nn;
    Eigen::VectorXd sd(p);
    std::vector<bool> usable(p, true);
    for (int j = 0; j < p; ++j) {
        const double var = xtx(j, j) / nn - mean(j) * mean(j);
        sd(j) = var > 0.0 ? std::sqrt(var) : 0.0;
        if (!(sd(j) > 0.0) || !std::isfinite(sd(j))) {
            usable[j] = false;
            sd(j) = 1.0;
            res.notes.push_back("column " + std::to_string(j) + " has zero variance; excluded");
        }
    }
    Eigen::MatrixXd g(p, p);  // Z'Z
    for (int j = 0; j < p; ++j)
        for (int k = 0; k <= j; ++k) {
            const double v = (xtx(j, k) - nn * mean(j) * mean(k)) / (sd(j) * sd(k));
            g(j, k) = v;
            g(k, j) = v;
        }
    Eigen::VectorXd c0(p);  // Z'y_c
    for (int j = 0; j < p; ++j) c0(j) = (xty(j) - nn * mean(j) * y_mean) / sd(j);
    const double tss = std::max(yty - nn * y_mean * y_mean, 0.0);

    const int max_steps = config.max_steps > 0 ? config.max_steps : 8 * std::max(p, 1);
    std::vector<int> active;
    std::vector<bool> in_active(p, false), barred(p, false);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);

    auto rss_of = [&](const Eigen::VectorXd& b) {
        return std::max(tss - 2.0 * b.dot(c0) + b.dot(g * b), 0.0);
    };
    auto record = [&](double lambda) {
        LarsPathPoint pt;
        pt.lambda = lambda;
        pt.rss = rss_of(beta);
        pt.df = static_cast<int>(active.size());
        pt.bic = bic_of(pt.rss, tss, n, pt.df, config.rss_floor_rel);
        res.path.push_back(pt);
        res.path_coefficients.push_back(beta);
    };

    Eigen::VectorXd c = c0;
    double lambda = 0.0;
    for (int j = 0; j < p; ++j)
        if (usable[j]) lambda = std::max(lambda, std::abs(c(j)));
    record(lambda);

    const double tiny = 1e-12 * std::max(lambda, 1.0);
    int steps = 0;
    bool just_dropped = false;
    while (lambda > tiny && steps++ < max_steps) {
        if (!just_dropped) {
            int enter = -1;
            double best = -1.0;
            for (int j = 0; j < p; ++j) {
                if (!usable[j] || barred[j] || in_active[j]) continue;
                if (std::abs(c(j)) > best) {
                    best = std::abs(c(j));
                    enter = j;
                }
            }
            if (enter < 0) break;
            active.push_back(enter);
            in_active[enter] = true;
        }
        just_dropped = false;
        const int m = static_cast<int>(active.size());

        Eigen::VectorXd s(m);
        Eigen::MatrixXd gaa(m, m);
        for (int ii = 0; ii < m; ++ii) {
            s(ii) = c(active[ii]) >= 0.0 ? 1.0 : -1.0;
            for (int jj = 0; jj < m; ++jj) gaa(ii, jj) = g(active[ii], active[jj]);
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gaa);
        Eigen::VectorXd d = ldlt.solve(s);
        const double resid = (gaa * d - s).cwiseAbs().maxCoeff();
        if (ldlt.info() != Eigen::Success || !d.allFinite() || resid > 1e-6) {
            // Collinear entrant: remove and bar it rather than failing.
            const int dropped = active.back();
            active.pop_back();
            in_active[dropped] = false;
            barred[dropped] = true;
            res.notes.push_back("column " + std::to_string(dropped) +
                                " collinear with the active set; dropped");
            if (active.empty()) break;
            continue;
        }

        Eigen::VectorXd a = Eigen::VectorXd::Zero(p);
        for (int j = 0; j < p; ++j) {
            if (!usable[j]) continue;
            double acc = 0.0;
            for (int ii = 0; ii < m; ++ii) acc += g(j, active[ii]) * d(ii);
            a(j) = acc;
        }

        // Largest step preserving max-correlation optimality.
        double gamma = lambda;  // full step to the OLS end of the path
        for (int j = 0; j < p; ++j) {
            if (!usable[j] || in_active[j] || barred[j]) continue;
            const double den_plus = 1.0 - a(j);
            const double den_minus = 1.0 + a(j);
            if (den_plus > 1e-14) {
                const double gj = (lambda - c(j)) / den_plus;
                if (gj > 1e-14 && gj < gamma) gamma = gj;
            }
            if (den_minus > 1e-14) {
                const double gj = (lambda + c(j)) / den_minus;
                if (gj > 1e-14 && gj < gamma) gamma = gj;
            }
        }
        // Lasso modification: a coefficient crossing zero leaves the set.
        int cross = -1;
        for (int ii = 0; ii < m; ++ii) {
            if (d(ii) == 0.0) continue;
            const double gj = -beta(active[ii]) / d(ii);
            if (gj > 1e-14 && gj < gamma) {
                gamma = gj;
                cross = ii;
            }
        }

        for (int ii = 0; ii < m; ++ii) beta(active[ii]) += gamma * d(ii);
        if (cross >= 0) {
            const int out = active[cross];
            beta(out) = 0.0;
            active.erase(active.begin() + cross);
            in_active[out] = false;
            just_dropped = true;
        }
        c = c0 - g * beta;
        lambda = 0.0;
        for (int ii = 0; ii < static_cast<int>(active.size()); ++ii)
            lambda = std::max(lambda, std::abs(c(active[ii])));
        if (active.empty()) {
            for (int j = 0; j < p; ++j)
                if (usable[j] && !barred[j]) lambda = std::max(lambda, std::abs(c(j)));
        }
        record(lambda);
        if (static_cast<long long>(active.size()) >= std::min<long long>(p, n - 1) &&
            cross < 0 && lambda <= tiny)
            break;
    }

    int best = 0;
    for (int k = 1; k < static_cast<int>(res.path.size()); ++k)
        if (res.path[k].bic < res.path[best].bic) best = k;
    res.selected_index = best;

    const Eigen::VectorXd& bz = res.path_coefficients[best];
    res.coefficients = Eigen::VectorXd::Zero(p);
    for (int j = 0; j < p; ++j) res.coefficients(j) = bz(j) / sd(j);
    res.intercept = y_mean - res.coefficients.dot(mean);
    return res;
}

LarsResult fit_lars_bic(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                        const LarsConfig& config) {
    if (a.rows() != y.size()) throw std::invalid_argument("lars: row mismatch");
    const Eigen::MatrixXd xtx = a.transpose() * a;
    const Eigen::VectorXd xty = a.transpose() * y;
    const Eigen::VectorXd col_sums = a.colwise().sum();
    return fit_lars_bic_gram(xtx, xty, col_sums, y.sum(), y.squaredNorm(), a.rows(), config);
}

}  // namespace caplab
