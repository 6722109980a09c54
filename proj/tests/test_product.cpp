#include <doctest.h>

#include <cmath>

#include "caplab/product/gmdb.hpp"

using namespace caplab;

namespace {

/// Hand-built deterministic 3-year scenario: B and S fixed, mortality via a
/// flat per-age q hit exactly through the Lee-Carter parameterization.
struct LedgerFixture {
    EsgParams esg;
    ScenarioSet set;
    LeeCarterParams lc;
    MortalityPath mort;
    GmdbProduct product;

    LedgerFixture() {
        esg.horizon = 3;
        set.params = esg;
        set.t0 = 0;
        set.short_rate.setConstant(1, 4, 0.02);
        set.account.resize(1, 4);
        set.account << 1.0, 1.02, 1.03, 1.05;
        set.equity.resize(1, 4);
        set.equity << 100.0, 95.0, 105.0, 90.0;

        lc.age_min = 60;
        lc.age_max = 70;
        lc.sigma_k = 0.0;
        lc.drift = 0.0;
        lc.kappa0 = 0.0;
        lc.a.resize(lc.n_ages());
        lc.b = Eigen::VectorXd::Zero(lc.n_ages());
        // a_x chosen so q is exactly 0.05 + 0.01*(x - 60) at kappa = 0.
        for (int i = 0; i < lc.n_ages(); ++i)
            lc.a(i) = std::log(-std::log(1.0 - (0.05 + 0.01 * i)));
        mort.params = lc;
        mort.t0 = 0;
        mort.kappa = Eigen::MatrixXd::Zero(1, 4);

        Cohort a{60, 80.0, 100.0, 10.0, 1.0};
        Cohort b{65, 50.0, 55.0, 5.0, 1.0};
        product.cohorts = {a, b};
    }
};

}  // namespace

TEST_CASE("three-year two-policyholder ledger reproduces exactly") {
    LedgerFixture fx;
    ProductState st = initial_state(fx.product);
    Eigen::VectorXd cf = project_cashflows(fx.product, st, fx.set, 0, fx.mort);

    // Independent spreadsheet-style ledger, same rounding rules.
    const double B[4] = {1.0, 1.02, 1.03, 1.05};
    const double S[4] = {100.0, 95.0, 105.0, 90.0};
    double fund[2] = {80.0, 50.0}, guar[2] = {100.0, 55.0}, surv[2] = {1.0, 1.0};
    const double prem[2] = {10.0, 5.0};
    const int age0[2] = {60, 65};
    double expected[3];
    for (int year = 1; year <= 3; ++year) {
        const double blend = 0.6 * (S[year] / S[year - 1]) + 0.4 * (B[year] / B[year - 1]);
        double paid = 0.0;
        for (int c = 0; c < 2; ++c) {
            const double f = (fund[c] + prem[c]) * blend;
            const double g = guar[c] + prem[c];
            const double q = lee_carter_q(fx.lc, age0[c] + year - 1, 0.0);
            const double dying = q * surv[c];
            if (g > f) paid += dying * (g - f);
            surv[c] -= dying;
            if (year == 3 && g > f) paid += surv[c] * (g - f);
            fund[c] = f;
            guar[c] = g;
        }
        expected[year - 1] = -paid * (1.0 / B[year]);
    }
    for (int t = 0; t < 3; ++t) CHECK(cf(t) == expected[t]);  // bit-level
    CHECK(cf(0) < 0.0);  // the guarantee binds in year one of this fixture
}

TEST_CASE("full death at tau=1 pays the guarantee shortfall") {
    LedgerFixture fx;
    // One policy, fund 100 and guarantee 120 after the premium, certain death.
    fx.product.cohorts = {Cohort{60, 90.0, 110.0, 10.0, 1.0}};
    fx.set.account.setOnes();     // flat zero-rate economy
    fx.set.equity.setConstant(100.0);
    fx.lc.a(0) = 1000.0;          // q(60) = 1
    fx.mort.params = fx.lc;
    ProductState st = initial_state(fx.product);
    Eigen::VectorXd cf = project_cashflows(fx.product, st, fx.set, 0, fx.mort);
    CHECK(cf(0) == doctest::Approx(-20.0).epsilon(1e-14));
    CHECK(cf(1) == 0.0);
    CHECK(cf(2) == 0.0);
    CHECK(st.survivors(0) == doctest::Approx(0.0));
}

TEST_CASE("guarantee never binds when funds outgrow premium accumulation") {
    LedgerFixture fx;
    // Strong deterministic growth, no initial shortfall.
    fx.set.account.resize(1, 4);
    fx.set.account << 1.0, 1.3, 1.69, 2.197;
    fx.set.equity.resize(1, 4);
    fx.set.equity << 100.0, 130.0, 169.0, 219.7;
    fx.product.cohorts = {Cohort{60, 100.0, 100.0, 10.0, 1.0},
                          Cohort{65, 80.0, 80.0, 5.0, 1.0}};
    ProductState st = initial_state(fx.product);
    Eigen::VectorXd cf = project_cashflows(fx.product, st, fx.set, 0, fx.mort);
    CHECK(cf.isZero(0.0));
}

TEST_CASE("cohort mass is conserved") {
    LedgerFixture fx;
    ProductState st = initial_state(fx.product);
    const double initial = fx.product.total_count();
    double deaths = 0.0;
    auto q = [&](int age, int year) { return fx.mort.q(0, age, year); };
    for (int t = 1; t <= 3; ++t) {
        const Eigen::ArrayXd before = st.survivors;
        project_year(fx.product, st, fx.set.S(0, t) / fx.set.S(0, t - 1),
                     fx.set.B(0, t) / fx.set.B(0, t - 1), q, t == 3);
        deaths += (before - st.survivors).sum();
    }
    // deaths plus maturity payouts account for every policy
    CHECK(deaths + st.survivors.sum() == doctest::Approx(initial).epsilon(1e-14));
}

TEST_CASE("a pointwise lower equity path never decreases the shortfall") {
    LedgerFixture fx;
    ProductState st_hi = initial_state(fx.product);
    Eigen::VectorXd cf_hi = project_cashflows(fx.product, st_hi, fx.set, 0, fx.mort);

    LedgerFixture lo = fx;
    lo.set.equity << 100.0, 90.0, 95.0, 80.0;  // pointwise lower from t=1
    ProductState st_lo = initial_state(lo.product);
    Eigen::VectorXd cf_lo = project_cashflows(lo.product, st_lo, lo.set, 0, lo.mort);

    // undeflated totals: cash flows are negative payments, deflators match
    CHECK((-cf_lo.array()).sum() >= (-cf_hi.array()).sum());
    for (int t = 0; t < 3; ++t) CHECK(cf_lo(t) <= cf_hi(t) + 1e-15);
}

TEST_CASE("portfolio csv round-trips and defaults cover 1000 policies") {
    GmdbProduct p = GmdbProduct::defaults();
    CHECK(p.cohorts.size() == 41);
    CHECK(p.total_count() == doctest::Approx(1000.0));
    const std::string path = "test_portfolio.csv";
    write_portfolio_csv(path, p);
    GmdbProduct q = read_portfolio_csv(path, 0.6, 0.4);
    CHECK(q.cohorts.size() == p.cohorts.size());
    CHECK(q.total_count() == doctest::Approx(1000.0));
    CHECK(q.cohorts[3].age0 == p.cohorts[3].age0);
    CHECK(q.cohorts[3].fund0 == p.cohorts[3].fund0);
    std::remove(path.c_str());
}
