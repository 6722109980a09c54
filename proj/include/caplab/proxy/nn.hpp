#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "caplab/math/lbfgs.hpp"
#include "caplab/model.hpp"

namespace caplab {

enum class NnVariant { Rand, Econ };

/// One regression head: a single hidden ReLU layer fitted to the deflated
/// cash flow at its time tau. v column 0 multiplies the constant component
/// xi_0 = 1; the remaining columns see the flattened inputs up to tau.
struct NnHead {
    Eigen::MatrixXd v;   // width x (1 + inputs)
    Eigen::VectorXd w;   // width
    double w0 = 0.0;
    double final_loss = 0.0;
    int iterations = 0;
};

/// Per-tau regress-later networks. The rand variant consumes the Gaussian
/// drivers and has the closed-form conditional expectation; the econ variant
/// consumes standardized economic features (r, log S, log B per step) and is
/// valued by conditional Monte Carlo.
struct NnModel {
    NnVariant variant = NnVariant::Rand;
    int horizon = 0;
    int dims = 0;        // driver dimensions (rand)
    int width = 0;
    std::vector<NnHead> heads;          // index tau - 1
    Eigen::VectorXd feature_mean, feature_sd;  // econ standardization, size 3*horizon

    int features_per_step() const { return variant == NnVariant::Rand ? dims : 3; }
    int inputs_for_head(int tau) const { return features_per_step() * tau; }
};

struct NnTrainConfig {
    int width = 100;
    LbfgsOptions optimizer;
    std::uint64_t seed = 0;
    int threads = 0;
};

/// Trains one head on (features, y) by full-batch L-BFGS from the seeded
/// uniform +-sqrt(6/(fan_in+fan_out)) initialization, keeping the best of
/// `restarts` seeded attempts. Deterministic per (data, seed). Throws on a
/// non-finite loss.
NnHead train_head(const Eigen::Ref<const Eigen::MatrixXd>& features, const Eigen::VectorXd& y,
                  int width, const LbfgsOptions& opt, std::uint64_t seed, int restarts = 1);

double head_predict(const NnHead& head, const Eigen::Ref<const Eigen::RowVectorXd>& features);
Eigen::VectorXd head_predict_batch(const NnHead& head,
                                   const Eigen::Ref<const Eigen::MatrixXd>& features);

/// Trains all horizon heads; head tau sees feature columns 1..f(tau).
NnModel train_nn_rand(const DriverTensor& drivers, const CashflowMatrix& cashflows,
                      const NnTrainConfig& cfg);
NnModel train_nn_econ(const ScenarioSet& set, const CashflowMatrix& cashflows,
                      const NnTrainConfig& cfg);

/// Raw economic features (r, log S, log B per step 1..horizon); the absolute
/// account level is base_account * rebased account for conditional sets.
Eigen::MatrixXd econ_features(const ScenarioSet& set);
/// Applies the model's stored standardization.
Eigen::MatrixXd standardize_features(const NnModel& model, const Eigen::MatrixXd& raw);

/// Conditional expectation of head tau at time t given the observed drivers
/// xi_obs (flattened steps 1..t; only the first dims*min(t,tau) entries are
/// read). Realized heads (tau <= t) degenerate to the direct evaluation.
double head_conditional_mean(const NnModel& model, int tau, const Eigen::VectorXd& xi_obs, int t);

/// Theorem-style closed form: sum of head conditional means over tau > t.
/// Rand variant only.
double closed_form_value(const NnModel& model, const Eigen::VectorXd& xi_obs, int t);

/// Batched time-1 closed-form values for many outer driver rows (t = 0 money).
Eigen::VectorXd closed_form_values_t1(const NnModel& model, const Eigen::MatrixXd& xi1);

/// Monte Carlo value of an econ-variant model at time 1 (t = 1 money):
/// average network output over conditioned economic scenarios, undone from
/// the t = 0 deflation with the outer account level.
double nn_mc_value(const NnModel& model, const ModelSpec& spec, const OuterState& outer,
                   int n_inner, std::uint64_t seed);

/// V1 in t = 1 money for either variant (rand uses the closed form).
double nn_value_t1(const NnModel& model, const ModelSpec& spec, const OuterState& outer,
                   int n_inner, std::uint64_t seed);

/// Mean out-of-fold squared error over the candidate widths; ties go to the
/// smaller width.
int cross_validate_width(const Eigen::Ref<const Eigen::MatrixXd>& features,
                         const Eigen::VectorXd& y, const std::vector<int>& widths, int folds,
                         std::uint64_t seed, const LbfgsOptions& opt = {});

void write_nn_model(const std::string& path, const NnModel& model);
NnModel read_nn_model(const std::string& path);

}  // namespace caplab
