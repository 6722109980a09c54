#include <doctest.h>

#include <cmath>

#include "caplab/math/normal.hpp"
#include "caplab/rng.hpp"

using namespace caplab;

TEST_CASE("normal cdf and inverse") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5));
    CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(norm_cdf(-8.0) == doctest::Approx(6.22096e-16).epsilon(1e-3));
    for (double p : {1e-9, 1e-4, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
        const double x = inv_norm_cdf(p);
        CHECK(norm_cdf(x) == doctest::Approx(p).epsilon(1e-10));
    }
    CHECK(inv_norm_cdf(0.01) == doctest::Approx(-2.3263478740408408).epsilon(1e-12));
    CHECK_THROWS(inv_norm_cdf(0.0));
    CHECK_THROWS(inv_norm_cdf(1.0));
}

TEST_CASE("relu node expectation: analytic points and degenerate sigma") {
    CHECK(relu_normal_mean(0.0, 1.0) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(relu_normal_mean(5.0, 0.0) == 5.0);
    CHECK(relu_normal_mean(-5.0, 0.0) == 0.0);
    CHECK_THROWS(relu_normal_mean(1.0, -1.0));
    // Equivalent form sigma*phi(z) + mu*Phi(z).
    for (double mu : {-2.0, -0.5, 0.0, 0.7, 3.0})
        for (double sigma : {0.1, 1.0, 4.0}) {
            const double z = mu / sigma;
            const double ref = sigma * norm_pdf(z) + mu * norm_cdf(z);
            CHECK(relu_normal_mean(mu, sigma) == doctest::Approx(ref).epsilon(1e-13));
        }
}

TEST_CASE("relu node expectation matches a Monte Carlo oracle") {
    Rng rng(202);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    const double mu = -1.0, sigma = 2.0;
    for (int i = 0; i < n; ++i) {
        const double x = std::max(mu + sigma * rng.next_normal(), 0.0);
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(relu_normal_mean(mu, sigma) - mean) < 3.0 * se);
}

TEST_CASE("relu node expectation is continuous at sigma -> 0") {
    for (double mu : {-3.0, -1.0, 0.0, 0.5, 2.0})
        CHECK(std::abs(relu_normal_mean(mu, 1e-8) - std::max(mu, 0.0)) < 1e-6);
}
