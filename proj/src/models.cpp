#include "mscp/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

namespace mscp {

namespace {

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& points, double bandwidth) {
  const Eigen::Index n = points.rows();
  const double scale = -0.5 / (bandwidth * bandwidth);
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gram(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double g = std::exp(scale * (points.row(i) - points.row(j)).squaredNorm());
      gram(i, j) = g;
      gram(j, i) = g;
    }
  }
  return gram;
}

Eigen::VectorXd class_scores(const SoftmaxModel& model, const FeatureVector& x) {
  return model.weights * x + model.bias;
}

Eigen::VectorXd stable_softmax(const Eigen::VectorXd& scores) {
  const double top = scores.maxCoeff();
  Eigen::VectorXd probs = (scores.array() - top).exp();
  return probs / probs.sum();
}

}  // namespace

double median_pairwise_distance(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw std::invalid_argument("median_pairwise_distance: need >= 2 points");
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      distances.push_back((points.row(i) - points.row(j)).norm());
    }
  }
  std::sort(distances.begin(), distances.end());
  const std::size_t m = distances.size();
  return (m % 2 == 1) ? distances[m / 2] : 0.5 * (distances[m / 2 - 1] + distances[m / 2]);
}

KernelRidgeModel fit_kernel_ridge(const std::vector<LabeledSample>& train, double bandwidth,
                                  double ridge) {
  if (train.empty()) throw std::invalid_argument("fit_kernel_ridge: empty training set");
  if (!(ridge > 0.0)) throw std::invalid_argument("fit_kernel_ridge: ridge must be positive");

  KernelRidgeModel model;
  model.support_points = feature_matrix(train);
  Eigen::VectorXd y(model.support_points.rows());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y[i] = train[static_cast<std::size_t>(i)].y.value();
  }

  if (bandwidth <= 0.0) {
    bandwidth = (model.support_points.rows() >= 2)
                    ? median_pairwise_distance(model.support_points)
                    : 0.0;
    if (bandwidth <= 0.0) bandwidth = 1.0;
  }
  model.bandwidth = bandwidth;

  const Eigen::MatrixXd gram = rbf_gram(model.support_points, bandwidth);
  const Eigen::MatrixXd identity =
      Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
  for (int attempt = 0; attempt < 3; ++attempt) {
    const Eigen::LLT<Eigen::MatrixXd> llt(gram + ridge * identity);
    if (llt.info() == Eigen::Success) {
      model.ridge = ridge;
      model.dual_coefficients = llt.solve(y);
      return model;
    }
    ridge *= 10.0;
  }
  throw std::runtime_error("fit_kernel_ridge: Cholesky failed after ridge escalation");
}

double predict_kernel_ridge(const KernelRidgeModel& model, const FeatureVector& x) {
  if (x.size() != model.support_points.cols()) {
    throw std::invalid_argument("predict_kernel_ridge: dimension mismatch");
  }
  const double scale = -0.5 / (model.bandwidth * model.bandwidth);
  double out = 0.0;
  for (Eigen::Index i = 0; i < model.support_points.rows(); ++i) {
    out += model.dual_coefficients[i] *
           std::exp(scale * (model.support_points.row(i) - x.transpose()).squaredNorm());
  }
  return out;
}

double softmax_loss(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                    const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias) {
  if (X.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw std::invalid_argument("softmax_loss: one label per row");
  }
  double loss = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Eigen::VectorXd scores = weights * X.row(i).transpose() + bias;
    const double top = scores.maxCoeff();
    const double log_norm = top + std::log((scores.array() - top).exp().sum());
    loss += log_norm - scores[labels[static_cast<std::size_t>(i)]];
  }
  return loss / static_cast<double>(X.rows());
}

SoftmaxGradient softmax_gradient(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                                 const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias) {
  if (X.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw std::invalid_argument("softmax_gradient: one label per row");
  }
  SoftmaxGradient grad;
  grad.weights = Eigen::MatrixXd::Zero(weights.rows(), weights.cols());
  grad.bias = Eigen::VectorXd::Zero(bias.size());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Eigen::VectorXd x = X.row(i).transpose();
    Eigen::VectorXd residual = stable_softmax(weights * x + bias);
    residual[labels[static_cast<std::size_t>(i)]] -= 1.0;
    grad.weights += residual * x.transpose();
    grad.bias += residual;
  }
  const double n = static_cast<double>(X.rows());
  grad.weights /= n;
  grad.bias /= n;
  return grad;
}

SoftmaxModel fit_softmax(const std::vector<LabeledSample>& train, int num_classes, int epochs,
                         double learning_rate) {
  if (train.empty()) throw std::invalid_argument("fit_softmax: empty training set");
  if (num_classes < 2) throw std::invalid_argument("fit_softmax: need at least 2 classes");
  if (epochs < 0) throw std::invalid_argument("fit_softmax: epochs must be >= 0");
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("fit_softmax: learning rate must be positive");
  }

  const Eigen::MatrixXd X = feature_matrix(train);
  std::vector<int> labels(train.size());
  std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const int c = train[i].y.class_index();
    if (c >= num_classes) throw std::invalid_argument("fit_softmax: label out of range");
    labels[i] = c;
    seen[static_cast<std::size_t>(c)] = true;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw std::invalid_argument("fit_softmax: every class must appear in the training set");
  }

  SoftmaxModel model;
  model.weights = Eigen::MatrixXd::Zero(num_classes, X.cols());
  model.bias = Eigen::VectorXd::Zero(num_classes);
  double loss = softmax_loss(X, labels, model.weights, model.bias);
  if (std::isnan(loss)) throw std::runtime_error("fit_softmax: loss is NaN");

  double step = learning_rate;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const SoftmaxGradient grad = softmax_gradient(X, labels, model.weights, model.bias);
    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      const Eigen::MatrixXd trial_weights = model.weights - step * grad.weights;
      const Eigen::VectorXd trial_bias = model.bias - step * grad.bias;
      const double trial_loss = softmax_loss(X, labels, trial_weights, trial_bias);
      if (std::isnan(trial_loss)) throw std::runtime_error("fit_softmax: loss is NaN");
      if (trial_loss <= loss) {
        model.weights = trial_weights;
        model.bias = trial_bias;
        loss = trial_loss;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return model;
}

Eigen::VectorXd predict_softmax(const SoftmaxModel& model, const FeatureVector& x) {
  if (x.size() != model.weights.cols()) {
    throw std::invalid_argument("predict_softmax: dimension mismatch");
  }
  return stable_softmax(class_scores(model, x));
}

}  // namespace mscp
