#include "caplab/esg/drivers.hpp"

#include <stdexcept>

#include "caplab/parallel.hpp"
#include "caplab/rng.hpp"

namespace caplab {

Eigen::VectorXd driver_row(int scenario, int steps, int dims, std::uint64_t seed) {
    Rng rng(substream_seed(seed, stream::kDrivers, static_cast<std::uint64_t>(scenario)));
    Eigen::VectorXd row(steps * dims);
    for (int k = 0; k < steps * dims; ++k) row(k) = rng.next_normal();
    return row;
}

DriverTensor generate_drivers(int n_scenarios, int steps, int dims, std::uint64_t seed,
                              int threads) {
    if (n_scenarios < 1) throw std::invalid_argument("generate_drivers: n_scenarios must be >= 1");
    if (steps < 1) throw std::invalid_argument("generate_drivers: horizon must be >= 1");
    if (dims < 1) throw std::invalid_argument("generate_drivers: dims must be >= 1");
    DriverTensor out;
    out.n_scenarios = n_scenarios;
    out.steps = steps;
    out.dims = dims;
    out.values.resize(n_scenarios, steps * dims);
    parallel_for(static_cast<std::size_t>(n_scenarios), [&](std::size_t i) {
        out.values.row(static_cast<int>(i)) =
            driver_row(static_cast<int>(i), steps, dims, seed).transpose();
    }, threads);
    return out;
}

}  // namespace caplab
