#include "caplab/mc/nested.hpp"

#include <stdexcept>

#include "caplab/io/csv.hpp"
#include "caplab/parallel.hpp"
#include "caplab/rng.hpp"

namespace caplab {

Eigen::VectorXd nested_distribution(const ModelSpec& model, const NestedConfig& config,
                                    int threads, long long max_path_steps) {
    if (config.m_outer < 1 || config.n_inner < 1)
        throw std::invalid_argument("nested_distribution: counts must be >= 1");
    const long long steps = config.budget() * model.esg.horizon;
    if (steps > max_path_steps)
        throw std::invalid_argument("nested_distribution: budget exceeds the configured path-step cap");

    Eigen::VectorXd v1(config.m_outer);
    parallel_for(static_cast<std::size_t>(config.m_outer), [&](std::size_t i) {
        const int idx = static_cast<int>(i);
        OuterState outer = outer_state_at(model, config.seed, idx);
        v1(idx) = value_conditional_mc(model, outer, config.n_inner,
                                       substream_seed(config.seed, stream::kInner, idx), 1);
    }, threads, 1);
    return v1;
}

void write_value_samples_csv(const std::string& path, const Eigen::VectorXd& v1) {
    CsvWriter w(path, {"scenario_id", "V1"});
    for (int i = 0; i < v1.size(); ++i) {
        w.field(static_cast<long long>(i));
        w.field(v1(i));
        w.end_row();
    }
    w.close();
}

}  // namespace caplab
