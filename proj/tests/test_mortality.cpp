#include <doctest.h>

#include <cmath>

#include "caplab/mortality/leecarter.hpp"

using namespace caplab;

TEST_CASE("deterministic limit: sigma_k = 0 gives the drifted formula") {
    LeeCarterParams p = LeeCarterParams::defaults();
    p.sigma_k = 0.0;
    DriverTensor d = generate_drivers(4, 10, 3, 3);
    MortalityPath m = simulate_mortality(p, d, 2, 10);
    for (int i = 0; i < 4; ++i)
        for (int t = 1; t <= 10; ++t) {
            const double kappa = p.kappa0 + p.drift * t;
            const int x = 50;
            const double ref =
                1.0 - std::exp(-std::exp(p.a(x - p.age_min) + p.b(x - p.age_min) * kappa));
            CHECK(m.q(i, x, t) == doctest::Approx(ref).epsilon(1e-13));
            CHECK(m.q(i, x, t) == m.q(0, x, t));  // identical across scenarios
        }
}

TEST_CASE("zero age sensitivity freezes mortality in time") {
    LeeCarterParams p = LeeCarterParams::defaults();
    p.b.setZero();
    DriverTensor d = generate_drivers(3, 8, 3, 5);
    MortalityPath m = simulate_mortality(p, d, 2, 8);
    for (int t = 2; t <= 8; ++t) CHECK(m.q(0, 70, t) == m.q(0, 70, 1));
}

TEST_CASE("kappa follows the random walk: mean and variance oracles") {
    LeeCarterParams p = LeeCarterParams::defaults();
    const int n = 100000, T = 10;
    DriverTensor d = generate_drivers(n, T, 3, 11);
    MortalityPath m = simulate_mortality(p, d, 2, T);
    Eigen::ArrayXd kT = m.kappa.col(T).array();
    const double mean = kT.mean();
    const double var = (kT - mean).square().sum() / n;
    const double se_mean = std::sqrt(var / n);
    CHECK(std::abs(mean - (p.kappa0 + p.drift * T)) < 3.0 * se_mean);
    // chi-square CLT: sd(sample var) ~ var * sqrt(2/n)
    CHECK(std::abs(var - T * p.sigma_k * p.sigma_k) <
          3.0 * T * p.sigma_k * p.sigma_k * std::sqrt(2.0 / n));
}

TEST_CASE("monotone age effect when the level increases with age") {
    LeeCarterParams p = LeeCarterParams::defaults();  // Gompertz level is increasing
    DriverTensor d = generate_drivers(2, 5, 3, 17);
    MortalityPath m = simulate_mortality(p, d, 2, 5);
    for (int x = p.age_min; x < p.age_max; ++x)
        CHECK(m.q(0, x, 3) <= m.q(0, x + 1, 3));
}

TEST_CASE("ages outside the table are rejected") {
    LeeCarterParams p = LeeCarterParams::defaults();
    DriverTensor d = generate_drivers(1, 2, 3, 1);
    MortalityPath m = simulate_mortality(p, d, 2, 2);
    CHECK_THROWS(m.q(0, p.age_min - 1, 1));
    CHECK_THROWS(m.q(0, p.age_max + 1, 1));
}

TEST_CASE("mortality table csv round-trips") {
    LeeCarterParams p = LeeCarterParams::defaults();
    const std::string path = "test_mortality_table.csv";
    write_mortality_table_csv(path, p);
    LeeCarterParams q = read_mortality_table_csv(path, p);
    CHECK(q.age_min == p.age_min);
    CHECK(q.age_max == p.age_max);
    CHECK(q.a.isApprox(p.a, 1e-15));
    CHECK(q.b.isApprox(p.b, 1e-15));
    std::remove(path.c_str());
}
