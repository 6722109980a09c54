#include <doctest.h>

#include <cmath>

#include "caplab/esg/drivers.hpp"
#include "caplab/rng.hpp"

using namespace caplab;

TEST_CASE("driver generation is deterministic per (seed, scenario)") {
    DriverTensor a = generate_drivers(4, 2, 2, 7);
    DriverTensor b = generate_drivers(4, 2, 2, 7);
    CHECK(a.values == b.values);

    // Thread count must not change anything.
    DriverTensor c = generate_drivers(4, 2, 2, 7, 2);
    CHECK(a.values == c.values);

    // A single row regenerated in isolation matches the batch.
    Eigen::VectorXd row2 = driver_row(2, 2, 2, 7);
    CHECK(row2.transpose() == a.values.row(2));

    DriverTensor d = generate_drivers(4, 2, 2, 8);
    CHECK(a.values != d.values);
}

TEST_CASE("driver moments approach N(0,1) at the CLT rate") {
    const int n = 100000;
    DriverTensor t = generate_drivers(n, 1, 1, 12345);
    const double mean = t.values.col(0).mean();
    const double var = (t.values.col(0).array() - mean).square().sum() / n;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));  // 0.0126
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("driver dimensions are uncorrelated") {
    const int n = 100000;
    DriverTensor t = generate_drivers(n, 2, 3, 99);
    const double bound = 4.0 / std::sqrt(static_cast<double>(n));
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b) {
            const auto xa = t.values.col(a).array();
            const auto xb = t.values.col(b).array();
            const double corr = ((xa - xa.mean()) * (xb - xb.mean())).mean();
            CHECK(std::abs(corr) < bound);
        }
}

TEST_CASE("driver generation rejects degenerate shapes") {
    CHECK_THROWS(generate_drivers(0, 1, 1, 1));
    CHECK_THROWS(generate_drivers(1, 0, 1, 1));
    CHECK_THROWS(generate_drivers(1, 1, 0, 1));
}
