#include "caplab/proxy/nn.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "caplab/io/csv.hpp"
#include "caplab/math/normal.hpp"
#include "caplab/parallel.hpp"
#include "caplab/rng.hpp"

namespace caplab {

namespace {

/// Mean-squared-error objective of one head; workspaces are reused across
/// L-BFGS iterations.
class HeadObjective {
   public:
    HeadObjective(const Eigen::Ref<const Eigen::MatrixXd>& feats, const Eigen::VectorXd& y,
                  int width)
        : feats_(feats), y_(y), k_(width), d_(static_cast<int>(feats.cols())) {
        const long n = feats_.rows();
        z_.resize(n, k_);
        m_.resize(n, k_);
        pred_.resize(n);
        r_.resize(n);
    }

    int n_params() const { return k_ * (1 + d_) + k_ + 1; }

    double operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
        const long n = feats_.rows();
        Eigen::Map<const Eigen::MatrixXd> v(theta.data(), k_, 1 + d_);
        Eigen::Map<const Eigen::VectorXd> w(theta.data() + k_ * (1 + d_), k_);
        const double w0 = theta(n_params() - 1);

        z_.noalias() = feats_ * v.rightCols(d_).transpose();
        z_.rowwise() += v.col(0).transpose();
        z_ = z_.cwiseMax(0.0);
        pred_.noalias() = z_ * w;
        pred_.array() += w0;
        r_ = (pred_ - y_) / static_cast<double>(n);
        const double loss = 0.5 * static_cast<double>(n) * r_.squaredNorm();

        grad.resize(n_params());
        Eigen::Map<Eigen::MatrixXd> gv(grad.data(), k_, 1 + d_);
        Eigen::Map<Eigen::VectorXd> gw(grad.data() + k_ * (1 + d_), k_);
        gw.noalias() = z_.transpose() * r_;
        grad(n_params() - 1) = r_.sum();
        m_.noalias() = r_ * w.transpose();
        m_.array() *= (z_.array() > 0.0).cast<double>();
        gv.col(0) = m_.colwise().sum().transpose();
        gv.rightCols(d_).noalias() = m_.transpose() * feats_;
        return loss;
    }

   private:
    Eigen::Ref<const Eigen::MatrixXd> feats_;
    const Eigen::VectorXd& y_;
    int k_, d_;
    Eigen::MatrixXd z_, m_;
    Eigen::VectorXd pred_, r_;
};

Eigen::VectorXd initial_theta(const Eigen::Ref<const Eigen::MatrixXd>& features, int width,
                              std::uint64_t seed) {
    const int d_in = static_cast<int>(features.cols());
    Rng rng(seed);
    const int n_hidden = width * (1 + d_in);
    Eigen::VectorXd theta(n_hidden + width + 1);
    const double lim_v = std::sqrt(6.0 / (1 + d_in + width));
    for (int i = 0; i < n_hidden; ++i) theta(i) = (2.0 * rng.next_uniform() - 1.0) * lim_v;
    const double lim_w = std::sqrt(6.0 / (width + 1));
    for (int i = 0; i < width; ++i)
        theta(n_hidden + i) = (2.0 * rng.next_uniform() - 1.0) * lim_w;
    theta(n_hidden + width) = 0.0;

    // Nodes that start inactive on most of the sample tend to die during
    // optimization; redraw such rows from the same stream so every node has
    // gradient flow at the start.
    Eigen::Map<Eigen::MatrixXd> v(theta.data(), width, 1 + d_in);
    const long n = features.rows();
    const long min_active = std::max<long>(1, n / 4);
    for (int k = 0; k < width; ++k) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            const long active =
                ((features * v.row(k).tail(d_in).transpose()).array() + v(k, 0) > 0.0).count();
            if (active >= min_active) break;
            for (int j = 0; j <= d_in; ++j) v(k, j) = (2.0 * rng.next_uniform() - 1.0) * lim_v;
        }
    }
    return theta;
}

bool hidden_layer_dead(const Eigen::Ref<const Eigen::MatrixXd>& features,
                       const Eigen::VectorXd& theta, int width) {
    const int d = static_cast<int>(features.cols());
    Eigen::Map<const Eigen::MatrixXd> v(theta.data(), width, 1 + d);
    Eigen::MatrixXd z = features * v.rightCols(d).transpose();
    z.rowwise() += v.col(0).transpose();
    return (z.array() <= 0.0).all();
}

}  // namespace

NnHead train_head(const Eigen::Ref<const Eigen::MatrixXd>& features, const Eigen::VectorXd& y,
                  int width, const LbfgsOptions& opt, std::uint64_t seed, int restarts) {
    if (width < 1) throw std::invalid_argument("train_head: width must be >= 1");
    if (features.rows() != y.size()) throw std::invalid_argument("train_head: row mismatch");
    const int d = static_cast<int>(features.cols());
    const long n = features.rows();

    const double mean = y.mean();
    double sd = std::sqrt(std::max((y.array() - mean).square().sum() / n, 0.0));
    const double scale = sd > 0.0 ? sd : 1.0;
    const Eigen::VectorXd ys = y / scale;

    HeadObjective obj(features, ys, width);
    // Best of `restarts` seeded initializations. A run whose hidden layer
    // collapsed (every node inactive everywhere, a constant predictor) on a
    // learnable target earns a few extra retries.
    const int planned = std::max(restarts, 1);
    Eigen::VectorXd theta;
    LbfgsReport rep;
    Eigen::VectorXd best_theta;
    LbfgsReport best_rep;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::uint64_t attempt = 0;; ++attempt) {
        theta = initial_theta(features, width, substream_seed(seed, stream::kInit, attempt));
        rep = lbfgs_minimize(obj, theta, opt);
        if (rep.final_loss < best_loss) {
            best_loss = rep.final_loss;
            best_theta = theta;
            best_rep = rep;
        }
        const bool degenerate =
            hidden_layer_dead(features, theta, width) && rep.final_loss > 0.05;
        if (attempt + 1 >= static_cast<std::uint64_t>(planned) && !degenerate) break;
        if (attempt + 1 >= static_cast<std::uint64_t>(planned) + 4) break;
    }
    theta = best_theta;
    rep = best_rep;

    NnHead head;
    head.v = Eigen::Map<const Eigen::MatrixXd>(theta.data(), width, 1 + d);
    head.w = Eigen::Map<const Eigen::VectorXd>(theta.data() + width * (1 + d), width) * scale;
    head.w0 = theta(width * (1 + d) + width) * scale;
    head.final_loss = 2.0 * rep.final_loss * scale * scale;  // mean squared error
    head.iterations = rep.iterations;
    return head;
}

double head_predict(const NnHead& head, const Eigen::Ref<const Eigen::RowVectorXd>& features) {
    const int d = static_cast<int>(head.v.cols()) - 1;
    Eigen::VectorXd z = head.v.col(0) + head.v.rightCols(d) * features.transpose();
    return head.w0 + z.cwiseMax(0.0).dot(head.w);
}

Eigen::VectorXd head_predict_batch(const NnHead& head,
                                   const Eigen::Ref<const Eigen::MatrixXd>& features) {
    const int d = static_cast<int>(head.v.cols()) - 1;
    Eigen::MatrixXd z = features * head.v.rightCols(d).transpose();
    z.rowwise() += head.v.col(0).transpose();
    return (z.cwiseMax(0.0) * head.w).array() + head.w0;
}

namespace {

NnModel train_model(NnVariant variant, const Eigen::MatrixXd& features,
                    const CashflowMatrix& cashflows, int dims, const NnTrainConfig& cfg) {
    if (cashflows.t0 != 0) throw std::invalid_argument("train_network: training data must start at t = 0");
    const int horizon = static_cast<int>(cashflows.cf.cols());
    NnModel model;
    model.variant = variant;
    model.horizon = horizon;
    model.dims = dims;
    model.width = cfg.width;
    model.heads.resize(horizon);
    parallel_for(static_cast<std::size_t>(horizon), [&](std::size_t k) {
        const int tau = static_cast<int>(k) + 1;
        const int d_in = model.inputs_for_head(tau);
        model.heads[k] = train_head(features.leftCols(d_in), cashflows.cf.col(tau - 1),
                                    cfg.width, cfg.optimizer,
                                    substream_seed(cfg.seed, stream::kInit, tau));
    }, cfg.threads, 1);
    return model;
}

}  // namespace

NnModel train_nn_rand(const DriverTensor& drivers, const CashflowMatrix& cashflows,
                      const NnTrainConfig& cfg) {
    if (drivers.n_scenarios != cashflows.n())
        throw std::invalid_argument("train_nn_rand: row mismatch");
    return train_model(NnVariant::Rand, drivers.values, cashflows, drivers.dims, cfg);
}

Eigen::MatrixXd econ_features(const ScenarioSet& set) {
    const int T = set.horizon();
    const int n = set.n();
    Eigen::MatrixXd f(n, 3 * (T - set.t0));
    const double log_base = std::log(set.base_account);
    for (int t = set.t0 + 1; t <= T; ++t) {
        const int c = 3 * (t - set.t0 - 1);
        for (int i = 0; i < n; ++i) {
            f(i, c) = set.r(i, t);
            f(i, c + 1) = std::log(set.S(i, t));
            f(i, c + 2) = std::log(set.B(i, t)) + log_base;
        }
    }
    return f;
}

Eigen::MatrixXd standardize_features(const NnModel& model, const Eigen::MatrixXd& raw) {
    Eigen::MatrixXd f = raw;
    for (int j = 0; j < f.cols(); ++j)
        f.col(j) = (f.col(j).array() - model.feature_mean(j)) / model.feature_sd(j);
    return f;
}

NnModel train_nn_econ(const ScenarioSet& set, const CashflowMatrix& cashflows,
                      const NnTrainConfig& cfg) {
    if (set.t0 != 0) throw std::invalid_argument("train_nn_econ: training set must start at t = 0");
    if (set.n() != cashflows.n()) throw std::invalid_argument("train_nn_econ: row mismatch");
    Eigen::MatrixXd raw = econ_features(set);
    const long n = raw.rows();
    Eigen::VectorXd mean(raw.cols()), sd(raw.cols());
    for (int j = 0; j < raw.cols(); ++j) {
        mean(j) = raw.col(j).mean();
        const double var = (raw.col(j).array() - mean(j)).square().sum() / n;
        sd(j) = var > 0.0 ? std::sqrt(var) : 1.0;
        raw.col(j) = (raw.col(j).array() - mean(j)) / sd(j);
    }
    NnModel model = train_model(NnVariant::Econ, raw, cashflows, 3, cfg);
    model.feature_mean = mean;
    model.feature_sd = sd;
    return model;
}

double head_conditional_mean(const NnModel& model, int tau, const Eigen::VectorXd& xi_obs,
                             int t) {
    if (model.variant != NnVariant::Rand)
        throw std::logic_error("closed-form valuation requires the rand variant");
    if (tau < 1 || tau > model.horizon) throw std::out_of_range("head_conditional_mean: tau");
    const NnHead& head = model.heads[tau - 1];
    const int d_in = model.inputs_for_head(tau);
    const int n_obs = model.dims * std::min(t, tau);
    if (xi_obs.size() < n_obs)
        throw std::invalid_argument("head_conditional_mean: missing observed drivers");
    double value = head.w0;
    for (int k = 0; k < head.w.size(); ++k) {
        double mu = head.v(k, 0);
        for (int j = 0; j < n_obs; ++j) mu += head.v(k, 1 + j) * xi_obs(j);
        double var = 0.0;
        for (int j = n_obs; j < d_in; ++j) var += head.v(k, 1 + j) * head.v(k, 1 + j);
        value += head.w(k) * relu_normal_mean(mu, std::sqrt(var));
    }
    return value;
}

double closed_form_value(const NnModel& model, const Eigen::VectorXd& xi_obs, int t) {
    if (model.variant != NnVariant::Rand)
        throw std::logic_error("closed_form_value: variant mismatch");
    if (t > model.horizon) throw std::out_of_range("closed_form_value: t past the horizon");
    double value = 0.0;
    for (int tau = t + 1; tau <= model.horizon; ++tau)
        value += head_conditional_mean(model, tau, xi_obs, t);
    return value;
}

Eigen::VectorXd closed_form_values_t1(const NnModel& model, const Eigen::MatrixXd& xi1) {
    if (model.variant != NnVariant::Rand)
        throw std::logic_error("closed_form_values_t1: variant mismatch");
    if (xi1.cols() != model.dims)
        throw std::invalid_argument("closed_form_values_t1: driver width mismatch");
    const long n = xi1.rows();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int tau = 2; tau <= model.horizon; ++tau) {
        const NnHead& head = model.heads[tau - 1];
        const int d_in = model.inputs_for_head(tau);
        Eigen::VectorXd sigma(head.w.size());
        for (int k = 0; k < head.w.size(); ++k) {
            double var = 0.0;
            for (int j = model.dims; j < d_in; ++j) var += head.v(k, 1 + j) * head.v(k, 1 + j);
            sigma(k) = std::sqrt(var);
        }
        Eigen::MatrixXd mu = xi1 * head.v.middleCols(1, model.dims).transpose();
        mu.rowwise() += head.v.col(0).transpose();
        for (long i = 0; i < n; ++i) {
            double v = head.w0;
            for (int k = 0; k < head.w.size(); ++k)
                v += head.w(k) * relu_normal_mean(mu(i, k), sigma(k));
            out(i) += v;
        }
    }
    return out;
}

double nn_mc_value(const NnModel& model, const ModelSpec& spec, const OuterState& outer,
                   int n_inner, std::uint64_t seed) {
    if (model.variant != NnVariant::Econ) throw std::logic_error("nn_mc_value: variant mismatch");
    if (n_inner < 1) throw std::invalid_argument("nn_mc_value: n_inner must be >= 1");
    const int T = model.horizon;
    DriverTensor drivers = generate_drivers(n_inner, T - 1, ModelSpec::kDims, seed, 1);
    ScenarioSet inner = simulate_economy_from(spec.esg, drivers, outer.econ, 1);

    // Features: step 1 comes from the outer state, steps 2..T from the inner
    // paths with the account expressed in absolute terms.
    Eigen::MatrixXd raw(n_inner, 3 * T);
    raw.col(0).setConstant(outer.econ.r);
    raw.col(1).setConstant(std::log(outer.econ.equity));
    raw.col(2).setConstant(std::log(outer.econ.account));
    raw.rightCols(3 * (T - 1)) = econ_features(inner);
    Eigen::MatrixXd feats = standardize_features(model, raw);

    Eigen::VectorXd total = Eigen::VectorXd::Zero(n_inner);
    for (int tau = 2; tau <= T; ++tau)
        total += head_predict_batch(model.heads[tau - 1], feats.leftCols(model.inputs_for_head(tau)));
    return total.mean() * outer.econ.account;
}

double nn_value_t1(const NnModel& model, const ModelSpec& spec, const OuterState& outer,
                   int n_inner, std::uint64_t seed) {
    if (model.variant == NnVariant::Rand)
        return closed_form_value(model, outer.xi1, 1) * outer.econ.account;
    return nn_mc_value(model, spec, outer, n_inner, seed);
}

int cross_validate_width(const Eigen::Ref<const Eigen::MatrixXd>& features,
                         const Eigen::VectorXd& y, const std::vector<int>& widths, int folds,
                         std::uint64_t seed, const LbfgsOptions& opt) {
    if (widths.empty()) throw std::invalid_argument("cross_validate_width: no candidates");
    if (folds < 2) throw std::invalid_argument("cross_validate_width: need >= 2 folds");
    const long n = features.rows();
    if (n < folds) throw std::invalid_argument("cross_validate_width: more folds than rows");

    std::vector<long> idx(n);
    std::iota(idx.begin(), idx.end(), 0L);
    Rng rng(substream_seed(seed, stream::kEval));
    for (long i = n - 1; i > 0; --i)
        std::swap(idx[i], idx[rng.next_u64() % static_cast<std::uint64_t>(i + 1)]);

    std::vector<int> candidates = widths;
    std::sort(candidates.begin(), candidates.end());
    int best_width = candidates.front();
    double best_mse = std::numeric_limits<double>::infinity();
    for (int width : candidates) {
        double mse_sum = 0.0;
        long count = 0;
        for (int f = 0; f < folds; ++f) {
            std::vector<long> train_rows, test_rows;
            for (long i = 0; i < n; ++i)
                (static_cast<int>(i % folds) == f ? test_rows : train_rows).push_back(idx[i]);
            Eigen::MatrixXd ftr(train_rows.size(), features.cols());
            Eigen::VectorXd ytr(train_rows.size());
            for (std::size_t i = 0; i < train_rows.size(); ++i) {
                ftr.row(static_cast<long>(i)) = features.row(train_rows[i]);
                ytr(static_cast<long>(i)) = y(train_rows[i]);
            }
            NnHead head = train_head(ftr, ytr, width, opt,
                                     substream_seed(seed, static_cast<std::uint64_t>(width), f),
                                     5);
            for (long row : test_rows) {
                const double e = head_predict(head, features.row(row)) - y(row);
                mse_sum += e * e;
                ++count;
            }
        }
        const double mse = mse_sum / static_cast<double>(count);
        if (mse < best_mse) {
            best_mse = mse;
            best_width = width;
        }
    }
    return best_width;
}

void write_nn_model(const std::string& path, const NnModel& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "caplabnn 1\n";
    out << "variant " << (model.variant == NnVariant::Rand ? "rand" : "econ") << "\n";
    out << "horizon " << model.horizon << " dims " << model.dims << " width " << model.width
        << "\n";
    if (model.variant == NnVariant::Econ) {
        out << "feature_mean";
        for (int j = 0; j < model.feature_mean.size(); ++j)
            out << ' ' << format_double(model.feature_mean(j));
        out << "\nfeature_sd";
        for (int j = 0; j < model.feature_sd.size(); ++j)
            out << ' ' << format_double(model.feature_sd(j));
        out << "\n";
    }
    for (int tau = 1; tau <= model.horizon; ++tau) {
        const NnHead& head = model.heads[tau - 1];
        out << "head " << tau << ' ' << head.v.cols() << ' ' << format_double(head.w0) << ' '
            << format_double(head.final_loss) << ' ' << head.iterations << "\n";
        out << "w";
        for (int k = 0; k < head.w.size(); ++k) out << ' ' << format_double(head.w(k));
        out << "\n";
        for (int k = 0; k < head.v.rows(); ++k) {
            out << "v";
            for (int j = 0; j < head.v.cols(); ++j) out << ' ' << format_double(head.v(k, j));
            out << "\n";
        }
    }
    out.close();
    if (!out) throw std::runtime_error("nn model write failed");
}

NnModel read_nn_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "caplabnn" || version != 1)
        throw std::runtime_error("unrecognized nn model file: " + path);
    NnModel model;
    std::string key, value;
    in >> key >> value;
    if (key != "variant") throw std::runtime_error("bad nn model header");
    model.variant = value == "rand" ? NnVariant::Rand : NnVariant::Econ;
    std::string k1, k2, k3;
    in >> k1 >> model.horizon >> k2 >> model.dims >> k3 >> model.width;
    if (model.variant == NnVariant::Econ) {
        model.feature_mean.resize(3 * model.horizon);
        model.feature_sd.resize(3 * model.horizon);
        in >> key;
        for (int j = 0; j < model.feature_mean.size(); ++j) in >> model.feature_mean(j);
        in >> key;
        for (int j = 0; j < model.feature_sd.size(); ++j) in >> model.feature_sd(j);
    }
    model.heads.resize(model.horizon);
    for (int h = 0; h < model.horizon; ++h) {
        int tau = 0;
        long cols = 0;
        in >> key >> tau >> cols;
        if (key != "head" || tau != h + 1) throw std::runtime_error("bad nn model head block");
        NnHead& head = model.heads[h];
        in >> head.w0 >> head.final_loss >> head.iterations;
        head.w.resize(model.width);
        in >> key;
        for (int k = 0; k < model.width; ++k) in >> head.w(k);
        head.v.resize(model.width, cols);
        for (int k = 0; k < model.width; ++k) {
            in >> key;
            for (long j = 0; j < cols; ++j) in >> head.v(k, j);
        }
    }
    if (!in) throw std::runtime_error("truncated nn model file: " + path);
    return model;
}

}  // namespace caplab
