#include <doctest.h>

#include <cmath>

#include "caplab/proxy/lars.hpp"
#include "caplab/rng.hpp"

using namespace caplab;

namespace {

/// Independent oracle: cyclic coordinate-descent lasso on the standardized
/// problem min 0.5||y_c - Z b||^2 + lambda ||b||_1, de-standardized afterwards.
Eigen::VectorXd cd_lasso(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double lambda) {
    const int n = static_cast<int>(a.rows());
    const int p = static_cast<int>(a.cols());
    Eigen::VectorXd mean(p), sd(p);
    Eigen::MatrixXd z(n, p);
    for (int j = 0; j < p; ++j) {
        mean(j) = a.col(j).mean();
        sd(j) = std::sqrt((a.col(j).array() - mean(j)).square().sum() / n);
        if (sd(j) > 0)
            z.col(j) = (a.col(j).array() - mean(j)) / sd(j);
        else
            z.col(j).setZero();
    }
    Eigen::VectorXd yc = y.array() - y.mean();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd resid = yc;
    for (int sweep = 0; sweep < 100000; ++sweep) {
        double max_change = 0.0;
        for (int j = 0; j < p; ++j) {
            if (sd(j) == 0.0) continue;
            const double rho = z.col(j).dot(resid) + n * beta(j);
            const double bj = std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho) / n;
            if (bj != beta(j)) {
                resid -= (bj - beta(j)) * z.col(j);
                max_change = std::max(max_change, std::abs(bj - beta(j)));
                beta(j) = bj;
            }
        }
        if (max_change < 1e-14) break;
    }
    for (int j = 0; j < p; ++j) beta(j) = sd(j) > 0 ? beta(j) / sd(j) : 0.0;
    return beta;
}

Eigen::MatrixXd random_design(Rng& rng, int n, int p) {
    Eigen::MatrixXd a(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = rng.next_normal();
    // correlate neighbouring columns to make the path non-trivial
    for (int j = 1; j < p; ++j) a.col(j) = 0.6 * a.col(j - 1) + 0.8 * a.col(j);
    return a;
}

}  // namespace

TEST_CASE("an exactly representable target recovers the single column") {
    Rng rng(13);
    Eigen::MatrixXd a = random_design(rng, 50, 10);
    Eigen::VectorXd y = a.col(3);
    LarsResult fit = fit_lars_bic(a, y);
    CHECK(fit.coefficients(3) == doctest::Approx(1.0).epsilon(1e-8));
    for (int j = 0; j < 10; ++j)
        if (j != 3) CHECK(std::abs(fit.coefficients(j)) < 1e-8);
}

TEST_CASE("zero target gives the null model") {
    Rng rng(14);
    Eigen::MatrixXd a = random_design(rng, 30, 6);
    LarsResult fit = fit_lars_bic(a, Eigen::VectorXd::Zero(30));
    CHECK(fit.coefficients.isZero(0.0));
    CHECK(fit.intercept == 0.0);
    CHECK(fit.path.size() == 1);
}

TEST_CASE("path knots match the coordinate-descent lasso oracle") {
    Rng rng(15);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd a = random_design(rng, 50, 10);
        Eigen::VectorXd beta_true = Eigen::VectorXd::Zero(10);
        beta_true(1) = 2.0;
        beta_true(4) = -1.5;
        beta_true(7) = 0.5;
        Eigen::VectorXd y = a * beta_true;
        for (int i = 0; i < 50; ++i) y(i) += 0.3 * rng.next_normal();

        LarsResult fit = fit_lars_bic(a, y);
        const double lambda = fit.path[fit.selected_index].lambda;
        Eigen::VectorXd oracle = cd_lasso(a, y, lambda);
        const double scale = std::max(1.0, oracle.cwiseAbs().maxCoeff());
        CHECK((fit.coefficients - oracle).cwiseAbs().maxCoeff() < 1e-6 * scale);
    }
}

TEST_CASE("column permutation only permutes the result") {
    Rng rng(16);
    Eigen::MatrixXd a = random_design(rng, 40, 8);
    Eigen::VectorXd y = a.col(0) - 0.5 * a.col(5);
    for (int i = 0; i < 40; ++i) y(i) += 0.1 * rng.next_normal();
    LarsResult base = fit_lars_bic(a, y);

    std::vector<int> perm = {3, 1, 7, 0, 6, 5, 2, 4};
    Eigen::MatrixXd ap(40, 8);
    for (int j = 0; j < 8; ++j) ap.col(j) = a.col(perm[j]);
    LarsResult permuted = fit_lars_bic(ap, y);
    for (int j = 0; j < 8; ++j)
        CHECK(permuted.coefficients(j) ==
              doctest::Approx(base.coefficients(perm[j])).epsilon(1e-9));
    CHECK(permuted.path[permuted.selected_index].bic ==
          doctest::Approx(base.path[base.selected_index].bic).epsilon(1e-9));
}

TEST_CASE("fits are deterministic") {
    Rng rng(17);
    Eigen::MatrixXd a = random_design(rng, 30, 5);
    Eigen::VectorXd y = a.col(2);
    LarsResult f1 = fit_lars_bic(a, y);
    LarsResult f2 = fit_lars_bic(a, y);
    CHECK(f1.coefficients == f2.coefficients);
    CHECK(f1.selected_index == f2.selected_index);
}

TEST_CASE("an exact duplicate column stays at the boundary with zero weight") {
    Rng rng(18);
    Eigen::MatrixXd a(40, 6);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 5; ++j) a(i, j) = rng.next_normal();
    a.col(5) = a.col(0);  // exact duplicate
    Eigen::VectorXd y = a.col(0) * 2.0;
    for (int i = 0; i < 40; ++i) y(i) += 0.05 * rng.next_normal();
    LarsResult fit = fit_lars_bic(a, y);
    CHECK(fit.coefficients(5) == 0.0);
    CHECK(fit.coefficients(0) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("a rank-deficient entrant is dropped with a diagnostic, not a failure") {
    // Accumulators of a duplicated column with a last-ulp inconsistency in
    // the cross moments force the duplicate through the entry argmax.
    Rng rng(19);
    Eigen::MatrixXd a(40, 3);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = rng.next_normal();
    a.col(2) = a.col(0);
    Eigen::VectorXd y = 2.0 * a.col(0) + 0.5 * a.col(1);
    Eigen::MatrixXd xtx = a.transpose() * a;
    Eigen::VectorXd xty = a.transpose() * y;
    xty(2) *= 1.0 + 1e-9;
    LarsResult fit = fit_lars_bic_gram(xtx, xty, a.colwise().sum(), y.sum(), y.squaredNorm(),
                                       a.rows());
    CHECK(!fit.notes.empty());
    CHECK(fit.coefficients(1) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(fit.coefficients(0) + fit.coefficients(2) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("zero-variance columns are excluded") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(20, 3);
    a.col(1).setConstant(4.0);
    Eigen::VectorXd y = a.col(0);
    LarsResult fit = fit_lars_bic(a, y);
    CHECK(fit.coefficients(1) == 0.0);
    CHECK(fit.coefficients(0) == doctest::Approx(1.0).epsilon(1e-6));
}
