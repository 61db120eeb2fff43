#include "mscp/ratio.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "mscp/rng.hpp"

namespace mscp {

namespace {

constexpr double kL2Penalty = 1e-4;

double stable_log1p_exp(double a) {
  // log(1 + e^a) without overflow.
  return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a)));
}

}  // namespace

double oracle_gaussian_ratio(const OracleGaussianRatio& model, const Eigen::VectorXd& z) {
  if (model.var_p <= 0.0 || model.var_q <= 0.0) {
    throw std::invalid_argument("oracle_gaussian_ratio: variances must be positive");
  }
  if (model.mu_p.size() != model.mu_q.size()) {
    throw std::invalid_argument("oracle_gaussian_ratio: mean dimensions differ");
  }
  if (z.size() != model.mu_p.size()) {
    throw std::invalid_argument("oracle_gaussian_ratio: input dimension mismatch");
  }
  const double d = static_cast<double>(z.size());
  const double log_ratio = 0.5 * d * (std::log(model.var_p) - std::log(model.var_q)) -
                           (z - model.mu_q).squaredNorm() / (2.0 * model.var_q) +
                           (z - model.mu_p).squaredNorm() / (2.0 * model.var_p);
  return std::exp(log_ratio);
}

double logistic_loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& labels,
                     const Eigen::VectorXd& weights, double bias, double l2_penalty) {
  if (X.rows() != labels.size()) throw std::invalid_argument("logistic_loss: one label per row");
  if (X.cols() != weights.size()) throw std::invalid_argument("logistic_loss: weight dimension");
  const Eigen::VectorXd scores = X * weights + Eigen::VectorXd::Constant(X.rows(), bias);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    loss += stable_log1p_exp(scores[i]) - labels[i] * scores[i];
  }
  loss /= static_cast<double>(X.rows());
  return loss + 0.5 * l2_penalty * weights.squaredNorm();
}

LogisticGradient logistic_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& labels,
                                   const Eigen::VectorXd& weights, double bias,
                                   double l2_penalty) {
  if (X.rows() != labels.size()) {
    throw std::invalid_argument("logistic_gradient: one label per row");
  }
  if (X.cols() != weights.size()) {
    throw std::invalid_argument("logistic_gradient: weight dimension");
  }
  const Eigen::VectorXd scores = X * weights + Eigen::VectorXd::Constant(X.rows(), bias);
  Eigen::VectorXd residual(scores.size());
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-scores[i]));
    residual[i] = p - labels[i];
  }
  const double n = static_cast<double>(X.rows());
  LogisticGradient grad;
  grad.weights = X.transpose() * residual / n + l2_penalty * weights;
  grad.bias = residual.sum() / n;
  return grad;
}

LogisticRatioModel fit_logistic_ratio(const Eigen::MatrixXd& source_features,
                                      const Eigen::MatrixXd& target_features, int epochs,
                                      double learning_rate) {
  const Eigen::Index n0 = source_features.rows();
  const Eigen::Index n1 = target_features.rows();
  if (n0 < 1 || n1 < 1) throw std::invalid_argument("fit_logistic_ratio: both classes nonempty");
  if (source_features.cols() != target_features.cols()) {
    throw std::invalid_argument("fit_logistic_ratio: feature dimensions differ");
  }
  if (epochs < 0) throw std::invalid_argument("fit_logistic_ratio: epochs must be >= 0");
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("fit_logistic_ratio: learning rate must be positive");
  }

  Eigen::MatrixXd X(n0 + n1, source_features.cols());
  X.topRows(n0) = source_features;
  X.bottomRows(n1) = target_features;
  Eigen::VectorXd labels = Eigen::VectorXd::Zero(n0 + n1);
  labels.tail(n1).setOnes();

  Eigen::VectorXd weights = Eigen::VectorXd::Zero(X.cols());
  double bias = 0.0;
  double loss = logistic_loss(X, labels, weights, bias, kL2Penalty);
  if (std::isnan(loss)) throw std::runtime_error("fit_logistic_ratio: loss is NaN");

  double step = learning_rate;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const LogisticGradient grad = logistic_gradient(X, labels, weights, bias, kL2Penalty);
    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      const Eigen::VectorXd trial_weights = weights - step * grad.weights;
      const double trial_bias = bias - step * grad.bias;
      const double trial_loss = logistic_loss(X, labels, trial_weights, trial_bias, kL2Penalty);
      if (std::isnan(trial_loss)) throw std::runtime_error("fit_logistic_ratio: loss is NaN");
      if (trial_loss <= loss) {
        weights = trial_weights;
        bias = trial_bias;
        loss = trial_loss;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }

  LogisticRatioModel model;
  model.weights = std::move(weights);
  model.bias = bias;
  model.prior_correction = static_cast<double>(n0) / static_cast<double>(n1);
  return model;
}

double eval_ratio(const RatioModel& model, const Eigen::VectorXd& z) {
  if (const auto* oracle = std::get_if<OracleGaussianRatio>(&model)) {
    return oracle_gaussian_ratio(*oracle, z);
  }
  const auto& logistic = std::get<LogisticRatioModel>(model);
  if (z.size() != logistic.weights.size()) {
    throw std::invalid_argument("eval_ratio: input dimension mismatch");
  }
  if (!(logistic.clip_min > 0.0) || logistic.clip_min > logistic.clip_max) {
    throw std::invalid_argument("eval_ratio: invalid clip bounds");
  }
  // ratio = (n0/n1) * sigma(a) / (1 - sigma(a)) = exp(a + log(n0/n1)),
  // evaluated in log space so saturated classifiers clip instead of
  // overflowing.
  const double log_ratio =
      logistic.weights.dot(z) + logistic.bias + std::log(logistic.prior_correction);
  if (log_ratio >= std::log(logistic.clip_max)) return logistic.clip_max;
  if (log_ratio <= std::log(logistic.clip_min)) return logistic.clip_min;
  return std::exp(log_ratio);
}

Eigen::MatrixXd balanced_target_subsample(const Eigen::MatrixXd& target_features, int k,
                                          std::uint64_t seed) {
  const int n = static_cast<int>(target_features.rows());
  if (k < 1) throw std::invalid_argument("balanced_target_subsample: k must be >= 1");
  if (k > n) throw std::invalid_argument("balanced_target_subsample: k exceeds sample size");
  Rng rng(seed);
  const std::vector<int> perm = random_permutation(n, rng);
  Eigen::MatrixXd out(k, target_features.cols());
  for (int i = 0; i < k; ++i) out.row(i) = target_features.row(perm[static_cast<std::size_t>(i)]);
  return out;
}

RatioFn make_ratio_fn(RatioModel model, FeatureMap feature_map) {
  return [model = std::move(model), feature_map = std::move(feature_map)](
             const FeatureVector& x) { return eval_ratio(model, feature_map(x)); };
}

}  // namespace mscp
