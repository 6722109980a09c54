#include <doctest.h>

#include <cmath>

#include "caplab/metrics/risk.hpp"
#include "caplab/rng.hpp"

using namespace caplab;

TEST_CASE("order-statistic quantiles on 1..100") {
    Eigen::VectorXd s(100);
    for (int i = 0; i < 100; ++i) s(i) = i + 1;
    CHECK(empirical_var(s, 0.01, Tail::Left) == -1.0);
    CHECK(empirical_es(s, 0.01, Tail::Left) == -1.0);
    CHECK(empirical_var(s, 0.01, Tail::Right) == 100.0);
    CHECK(empirical_es(s, 0.01, Tail::Right) == 100.0);
    CHECK(empirical_var(s, 0.05, Tail::Left) == -5.0);
    CHECK(empirical_es(s, 0.05, Tail::Left) == -3.0);  // mean of {1..5}
}

TEST_CASE("constant samples: tails equal the constant, zero after centering") {
    Eigen::VectorXd s = Eigen::VectorXd::Constant(200, 3.5);
    CHECK(empirical_var(s, 0.01, Tail::Left) == -3.5);
    CHECK(empirical_var(s, 0.01, Tail::Right) == 3.5);
    RiskReport r = make_risk_report(s);
    CHECK(r.mean == doctest::Approx(3.5));
    CHECK(r.left_var == 0.0);
    CHECK(r.left_es == 0.0);
    CHECK(r.right_var == 0.0);
    CHECK(r.right_es == 0.0);
}

TEST_CASE("standard normal tail oracles at alpha = 1%") {
    const int n = 1000000;
    Eigen::VectorXd s(n);
    Rng rng(4321);
    for (int i = 0; i < n; ++i) s(i) = rng.next_normal();
    CHECK(std::abs(empirical_var(s, 0.01, Tail::Left) - 2.3263) < 0.02);
    CHECK(std::abs(empirical_es(s, 0.01, Tail::Left) - 2.665) < 0.03);
    CHECK(std::abs(empirical_var(s, 0.01, Tail::Right) - 2.3263) < 0.02);
    CHECK(std::abs(empirical_es(s, 0.01, Tail::Right) - 2.665) < 0.03);
}

TEST_CASE("two-point distribution expected shortfall") {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(100);
    s(0) = -10.0;
    CHECK(empirical_es(s, 0.01, Tail::Left) == 10.0);
}

TEST_CASE("mean centering examples and idempotence") {
    Eigen::VectorXd s(3);
    s << 1.0, 2.0, 3.0;
    Eigen::VectorXd c = mean_center(s);
    CHECK(c(0) == -1.0);
    CHECK(c(1) == 0.0);
    CHECK(c(2) == 1.0);
    CHECK(mean_center(c) == c);
    CHECK(mean_center(Eigen::VectorXd::Constant(5, 7.0)).isZero(0.0));
    CHECK_THROWS(mean_center(Eigen::VectorXd()));
}

TEST_CASE("mape arithmetic") {
    Eigen::VectorXd same = Eigen::VectorXd::Constant(4, 2.0);
    CHECK(mape(same, 2.0) == 0.0);
    CHECK(mape(Eigen::VectorXd::Constant(4, 2.2), 2.0) == doctest::Approx(0.10));
    Eigen::VectorXd two(2);
    two << 1.6, 2.4;
    CHECK(mape(two, 2.0) == doctest::Approx(0.20));
    CHECK_THROWS(mape(same, 0.0));
}

TEST_CASE("insufficient samples for the requested tail") {
    Eigen::VectorXd s = Eigen::VectorXd::Ones(50);
    CHECK_THROWS(empirical_var(s, 0.01, Tail::Left));
    CHECK_THROWS(empirical_es(s, 0.01, Tail::Left));
}

TEST_CASE("expected shortfall dominates value at risk on both tails") {
    Rng rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd s(500);
        for (int i = 0; i < 500; ++i) {
            const double z = rng.next_normal();
            s(i) = z + 0.3 * z * z * z;  // skewed
        }
        CHECK(empirical_es(s, 0.01, Tail::Left) >= empirical_var(s, 0.01, Tail::Left));
        CHECK(empirical_es(s, 0.01, Tail::Right) >= empirical_var(s, 0.01, Tail::Right));
        RiskReport r = make_risk_report(s);
        CHECK(r.left_es <= r.left_var);
        CHECK(r.left_var <= 0.0);
        CHECK(0.0 <= r.right_var);
        CHECK(r.right_var <= r.right_es);
    }
}

TEST_CASE("centered risk metrics are translation invariant") {
    Rng rng(10);
    Eigen::VectorXd s(1000);
    for (int i = 0; i < 1000; ++i) s(i) = rng.next_normal() * 3.0;
    RiskReport a = make_risk_report(s);
    RiskReport b = make_risk_report(s.array() + 1234.5);
    CHECK(b.mean == doctest::Approx(a.mean + 1234.5).epsilon(1e-12));
    CHECK(b.left_var == doctest::Approx(a.left_var).epsilon(1e-9));
    CHECK(b.left_es == doctest::Approx(a.left_es).epsilon(1e-9));
    CHECK(b.right_var == doctest::Approx(a.right_var).epsilon(1e-9));
    CHECK(b.right_es == doctest::Approx(a.right_es).epsilon(1e-9));
}
