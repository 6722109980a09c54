#pragma once

#include <Eigen/Dense>
#include <cassert>
#include <string>
#include <vector>

#include "caplab/esg/economy.hpp"
#include "caplab/mortality/leecarter.hpp"

namespace caplab {

/// One cohort of identical policies: same entry age, fund, guarantee and
/// premium. count policies start with one survivor unit each.
struct Cohort {
    int age0 = 30;
    double fund0 = 100.0;
    double guarantee0 = 100.0;
    double premium = 10.0;
    double count = 1.0;
};

/// "Guarantee return on death" variable annuity over a policyholder
/// portfolio. Timing convention per year: premium at the start of the year,
/// rebalancing to the target allocation right after, deaths at the end.
/// The modeled liability is the guarantee shortfall max(G - F, 0) on death
/// and at maturity; the pass-through fund itself is not recorded.
struct GmdbProduct {
    std::vector<Cohort> cohorts;
    double w_equity = 0.6;
    double w_cash = 0.4;

    double total_count() const;
    void validate(int age_min, int age_max, int horizon) const;

    static GmdbProduct defaults(int n_policyholders = 1000, int age_lo = 30, int age_hi = 70,
                                double fund0 = 100.0, double premium = 10.0);
};

struct ProductState {
    Eigen::ArrayXd fund;       // per cohort, per policy
    Eigen::ArrayXd guarantee;  // per cohort, per policy
    Eigen::ArrayXd survivors;  // per cohort, in policy units
    int year = 0;              // last completed grid time
};

ProductState initial_state(const GmdbProduct& product);

/// Advances the state by one year and returns the undeflated guarantee
/// shortfall paid in that year (>= 0). q(age, year) is the one-year death
/// probability of a policy aged `age` at the start of the year.
template <class QFn>
double project_year(const GmdbProduct& product, ProductState& st, double gross_equity,
                    double gross_cash, QFn&& q, bool final_year) {
    const double blend = product.w_equity * gross_equity + product.w_cash * gross_cash;
    double shortfall = 0.0;
    for (std::size_t c = 0; c < product.cohorts.size(); ++c) {
        const Cohort& ch = product.cohorts[c];
        const double f = (st.fund(c) + ch.premium) * blend;
        assert(f >= 0.0);
        const double g = st.guarantee(c) + ch.premium;
        const double qx = q(ch.age0 + st.year, st.year + 1);
        const double dying = qx * st.survivors(c);
        if (g > f) shortfall += dying * (g - f);
        st.survivors(c) -= dying;
        if (final_year && g > f) shortfall += st.survivors(c) * (g - f);
        st.fund(c) = f;
        st.guarantee(c) = g;
    }
    st.year += 1;
    return shortfall;
}

/// Cash flows of scenario i over years set.t0+1..horizon, deflated to set.t0.
/// Payments made by the company appear as cf <= 0. The state is advanced to
/// the horizon (pass initial_state for a full projection).
Eigen::VectorXd project_cashflows(const GmdbProduct& product, ProductState& st,
                                  const ScenarioSet& set, int scenario,
                                  const MortalityPath& mortality);

/// Liability cash flows cf[scenario, tau] for tau = t0+1..horizon.
struct CashflowMatrix {
    int t0 = 0;
    Eigen::MatrixXd cf;  // n x (horizon - t0)

    int n() const { return static_cast<int>(cf.rows()); }
    double at(int i, int tau) const { return cf(i, tau - t0 - 1); }
};

CashflowMatrix build_cashflow_matrix(const GmdbProduct& product, const ScenarioSet& set,
                                     const MortalityPath& mortality, int threads = 0);

/// Portfolio CSV (columns age, fund0, guarantee0, premium, count).
void write_portfolio_csv(const std::string& path, const GmdbProduct& product);
GmdbProduct read_portfolio_csv(const std::string& path, double w_equity, double w_cash);

void write_cashflow_csv(const std::string& path, const CashflowMatrix& cfm);

}  // namespace caplab
