#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace caplab {

/// I.i.d. standard-normal drivers, one row per scenario. Column (t-1)*dims + d
/// holds the draw of dimension d for the step into grid time t, t = 1..steps.
/// The constant component xi_0 = 1 is implicit and prepended by consumers.
struct DriverTensor {
    int n_scenarios = 0;
    int steps = 0;  // number of annual steps covered
    int dims = 0;
    Eigen::MatrixXd values;  // n_scenarios x (steps * dims)

    double xi(int scenario, int step, int dim) const {
        return values(scenario, (step - 1) * dims + dim);
    }
    Eigen::Ref<const Eigen::VectorXd> row(int scenario) const { return values.row(scenario).transpose(); }
};

/// Deterministic per (seed, scenario index): scenario i's draws come from its
/// own substream, so generation order and thread count do not matter.
DriverTensor generate_drivers(int n_scenarios, int steps, int dims, std::uint64_t seed,
                              int threads = 0);

/// Single scenario row of the same stream (row i of generate_drivers).
Eigen::VectorXd driver_row(int scenario, int steps, int dims, std::uint64_t seed);

}  // namespace caplab
