#include "caplab/mortality/leecarter.hpp"

#include <cmath>
#include <stdexcept>

#include "caplab/io/csv.hpp"
#include "caplab/parallel.hpp"

namespace caplab {

void LeeCarterParams::validate() const {
    if (age_min > age_max) throw std::invalid_argument("leecarter: bad age range");
    if (a.size() != n_ages() || b.size() != n_ages())
        throw std::invalid_argument("leecarter: table size does not cover the age range");
    if (sigma_k < 0.0) throw std::invalid_argument("leecarter: sigma_k must be >= 0");
}

LeeCarterParams LeeCarterParams::defaults() {
    LeeCarterParams p;
    p.a.resize(p.n_ages());
    p.b.resize(p.n_ages());
    for (int i = 0; i < p.n_ages(); ++i) {
        const int x = p.age_min + i;
        p.a(i) = -9.5 + 0.085 * x;
        p.b(i) = 1.0 / p.n_ages();
    }
    return p;
}

double lee_carter_q(const LeeCarterParams& params, int x, double kappa) {
    if (x < params.age_min || x > params.age_max)
        throw std::out_of_range("mortality: age outside the table");
    const int ix = x - params.age_min;
    const double m = std::exp(params.a(ix) + params.b(ix) * kappa);
    const double qv = 1.0 - std::exp(-m);
    return qv < 0.0 ? 0.0 : (qv > 1.0 ? 1.0 : qv);
}

double MortalityPath::q(int i, int x, int t) const {
    return lee_carter_q(params, x, kappa(i, t - t0));
}

MortalityPath simulate_mortality_from(const LeeCarterParams& params, const DriverTensor& drivers,
                                      int dim, int horizon, int t0, double kappa_init,
                                      int threads) {
    params.validate();
    if (dim < 0 || dim >= drivers.dims)
        throw std::invalid_argument("simulate_mortality: driver dimension out of range");
    const int n_steps = horizon - t0;
    if (drivers.steps < n_steps)
        throw std::invalid_argument("simulate_mortality: drivers cover fewer steps than horizon");
    MortalityPath path;
    path.params = params;
    path.t0 = t0;
    path.kappa.resize(drivers.n_scenarios, n_steps + 1);
    parallel_for(static_cast<std::size_t>(drivers.n_scenarios), [&](std::size_t si) {
        const int i = static_cast<int>(si);
        double k = kappa_init;
        path.kappa(i, 0) = k;
        for (int s = 1; s <= n_steps; ++s) {
            k += params.drift + params.sigma_k * drivers.xi(i, s, dim);
            path.kappa(i, s) = k;
        }
    }, threads);
    return path;
}

MortalityPath simulate_mortality(const LeeCarterParams& params, const DriverTensor& drivers,
                                 int dim, int horizon, int threads) {
    return simulate_mortality_from(params, drivers, dim, horizon, 0, params.kappa0, threads);
}

void write_mortality_table_csv(const std::string& path, const LeeCarterParams& params) {
    CsvWriter w(path, {"x", "a_x", "b_x"});
    for (int i = 0; i < params.n_ages(); ++i) {
        w.field(static_cast<long long>(params.age_min + i));
        w.field(params.a(i));
        w.field(params.b(i));
        w.end_row();
    }
    w.close();
}

LeeCarterParams read_mortality_table_csv(const std::string& path,
                                         const LeeCarterParams& dynamics) {
    CsvTable table = read_csv(path);
    const int cx = table.column("x");
    const int ca = table.column("a_x");
    const int cb = table.column("b_x");
    int lo = 1 << 30, hi = -(1 << 30);
    for (const auto& row : table.rows) {
        const int x = std::stoi(row[cx]);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    LeeCarterParams p = dynamics;
    p.age_min = lo;
    p.age_max = hi;
    p.a = Eigen::VectorXd::Zero(p.n_ages());
    p.b = Eigen::VectorXd::Zero(p.n_ages());
    for (const auto& row : table.rows) {
        const int x = std::stoi(row[cx]);
        p.a(x - lo) = std::stod(row[ca]);
        p.b(x - lo) = std::stod(row[cb]);
    }
    p.validate();
    return p;
}

}  // namespace caplab
