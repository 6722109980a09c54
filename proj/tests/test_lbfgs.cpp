#include <doctest.h>

#include <cmath>

#include "caplab/math/lbfgs.hpp"

using namespace caplab;

TEST_CASE("lbfgs solves a separable quadratic") {
    Eigen::VectorXd target(4);
    target << 1.0, -2.0, 3.0, 0.5;
    Eigen::VectorXd scales(4);
    scales << 1.0, 10.0, 0.1, 4.0;
    auto f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = scales.asDiagonal() * (x - target);
        return 0.5 * (x - target).dot(g);
    };
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    LbfgsReport rep = lbfgs_minimize(f, x, {});
    CHECK(rep.converged);
    CHECK((x - target).lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("lbfgs solves the Rosenbrock valley") {
    auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        const double a = 1.0 - x(0);
        const double b = x(1) - x(0) * x(0);
        g.resize(2);
        g(0) = -2.0 * a - 400.0 * x(0) * b;
        g(1) = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    Eigen::VectorXd x(2);
    x << -1.2, 1.0;
    LbfgsOptions opt;
    opt.max_iterations = 200;
    opt.f_rel_tol = 1e-16;
    LbfgsReport rep = lbfgs_minimize(f, x, opt);
    CHECK(std::abs(x(0) - 1.0) < 1e-6);
    CHECK(std::abs(x(1) - 1.0) < 1e-6);
    CHECK(rep.final_loss < 1e-12);
}

TEST_CASE("a non-finite starting loss is signalled") {
    auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = x;
        return std::numeric_limits<double>::quiet_NaN();
    };
    Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(lbfgs_minimize(f, x, {}), std::runtime_error);
}

TEST_CASE("lbfgs is deterministic") {
    auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = 2.0 * x;
        g(0) += std::cos(x(0));
        return x.squaredNorm() + std::sin(x(0));
    };
    Eigen::VectorXd a = Eigen::VectorXd::Constant(3, 2.0);
    Eigen::VectorXd b = a;
    lbfgs_minimize(f, a, {});
    lbfgs_minimize(f, b, {});
    CHECK(a == b);
}
