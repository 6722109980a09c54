#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "caplab/model.hpp"

namespace caplab {

/// Nested Monte Carlo estimator of the time-1 value distribution.
struct NestedConfig {
    int m_outer = 100;
    int n_inner = 100;
    std::uint64_t seed = 0;

    long long budget() const { return static_cast<long long>(m_outer) * n_inner; }
};

/// One V1 sample per outer scenario. Streaming: inner paths are generated,
/// consumed and discarded per outer scenario, each on its own substream, so
/// results are deterministic per seed and order-independent.
/// max_path_steps guards the total M*N*horizon work.
Eigen::VectorXd nested_distribution(const ModelSpec& model, const NestedConfig& config,
                                    int threads = 0,
                                    long long max_path_steps = 4'000'000'000LL);

void write_value_samples_csv(const std::string& path, const Eigen::VectorXd& v1);

}  // namespace caplab
