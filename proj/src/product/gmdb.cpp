#include "caplab/product/gmdb.hpp"

#include <stdexcept>

#include "caplab/io/csv.hpp"
#include "caplab/parallel.hpp"

namespace caplab {

double GmdbProduct::total_count() const {
    double s = 0.0;
    for (const auto& c : cohorts) s += c.count;
    return s;
}

void GmdbProduct::validate(int age_min, int age_max, int horizon) const {
    if (cohorts.empty()) throw std::invalid_argument("product: no cohorts");
    if (w_equity < 0.0 || w_cash < 0.0 || std::abs(w_equity + w_cash - 1.0) > 1e-12)
        throw std::invalid_argument("product: allocation weights must be >= 0 and sum to 1");
    for (const auto& c : cohorts) {
        if (c.fund0 < 0.0 || c.guarantee0 < 0.0 || c.premium < 0.0 || c.count <= 0.0)
            throw std::invalid_argument("product: cohort fields must be non-negative");
        if (c.age0 < age_min || c.age0 + horizon > age_max)
            throw std::invalid_argument("product: cohort ages leave the mortality table");
    }
}

GmdbProduct GmdbProduct::defaults(int n_policyholders, int age_lo, int age_hi, double fund0,
                                  double premium) {
    GmdbProduct p;
    const int n_ages = age_hi - age_lo + 1;
    const int base = n_policyholders / n_ages;
    const int rem = n_policyholders % n_ages;
    for (int k = 0; k < n_ages; ++k) {
        Cohort c;
        c.age0 = age_lo + k;
        c.fund0 = fund0;
        c.guarantee0 = fund0;
        c.premium = premium;
        c.count = base + (k < rem ? 1 : 0);
        p.cohorts.push_back(c);
    }
    return p;
}

ProductState initial_state(const GmdbProduct& product) {
    const int n = static_cast<int>(product.cohorts.size());
    ProductState st;
    st.fund.resize(n);
    st.guarantee.resize(n);
    st.survivors.resize(n);
    for (int c = 0; c < n; ++c) {
        st.fund(c) = product.cohorts[c].fund0;
        st.guarantee(c) = product.cohorts[c].guarantee0;
        st.survivors(c) = product.cohorts[c].count;
    }
    st.year = 0;
    return st;
}

Eigen::VectorXd project_cashflows(const GmdbProduct& product, ProductState& st,
                                  const ScenarioSet& set, int scenario,
                                  const MortalityPath& mortality) {
    const int horizon = set.horizon();
    if (st.year != set.t0) throw std::invalid_argument("project_cashflows: state/scenario time mismatch");
    if (mortality.t0 != set.t0) throw std::invalid_argument("project_cashflows: mortality time mismatch");
    Eigen::VectorXd cf(horizon - set.t0);
    auto q = [&](int age, int year) { return mortality.q(scenario, age, year); };
    for (int t = set.t0 + 1; t <= horizon; ++t) {
        const double ge = set.S(scenario, t) / set.S(scenario, t - 1);
        const double gc = set.B(scenario, t) / set.B(scenario, t - 1);
        const double paid = project_year(product, st, ge, gc, q, t == horizon);
        cf(t - set.t0 - 1) = -paid * set.deflator(scenario, t);
    }
    return cf;
}

CashflowMatrix build_cashflow_matrix(const GmdbProduct& product, const ScenarioSet& set,
                                     const MortalityPath& mortality, int threads) {
    CashflowMatrix out;
    out.t0 = set.t0;
    out.cf.resize(set.n(), set.horizon() - set.t0);
    parallel_for(static_cast<std::size_t>(set.n()), [&](std::size_t i) {
        ProductState st = initial_state(product);
        st.year = set.t0;
        out.cf.row(static_cast<int>(i)) =
            project_cashflows(product, st, set, static_cast<int>(i), mortality).transpose();
    }, threads);
    return out;
}

void write_portfolio_csv(const std::string& path, const GmdbProduct& product) {
    CsvWriter w(path, {"age", "fund0", "guarantee0", "premium", "count"});
    for (const auto& c : product.cohorts) {
        w.field(static_cast<long long>(c.age0));
        w.field(c.fund0);
        w.field(c.guarantee0);
        w.field(c.premium);
        w.field(c.count);
        w.end_row();
    }
    w.close();
}

GmdbProduct read_portfolio_csv(const std::string& path, double w_equity, double w_cash) {
    CsvTable table = read_csv(path);
    const int ca = table.column("age");
    const int cf = table.column("fund0");
    const int cg = table.column("guarantee0");
    const int cp = table.column("premium");
    const int cc = table.column("count");
    GmdbProduct p;
    p.w_equity = w_equity;
    p.w_cash = w_cash;
    for (const auto& row : table.rows) {
        Cohort c;
        c.age0 = std::stoi(row[ca]);
        c.fund0 = std::stod(row[cf]);
        c.guarantee0 = std::stod(row[cg]);
        c.premium = std::stod(row[cp]);
        c.count = std::stod(row[cc]);
        p.cohorts.push_back(c);
    }
    return p;
}

void write_cashflow_csv(const std::string& path, const CashflowMatrix& cfm) {
    CsvWriter w(path, {"scenario_id", "tau", "cf"});
    for (int i = 0; i < cfm.n(); ++i) {
        for (int tau = cfm.t0 + 1; tau <= cfm.t0 + static_cast<int>(cfm.cf.cols()); ++tau) {
            w.field(static_cast<long long>(i));
            w.field(static_cast<long long>(tau));
            w.field(cfm.at(i, tau));
            w.end_row();
        }
    }
    w.close();
}

}  // namespace caplab
