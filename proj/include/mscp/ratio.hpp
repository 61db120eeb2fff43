#pragma once

#include <cstdint>
#include <variant>

#include <Eigen/Core>

#include "mscp/core.hpp"

namespace mscp {

/// Closed-form ratio of two isotropic Gaussian densities, target (mu_q,
/// var_q) over source (mu_p, var_p).
struct OracleGaussianRatio {
  Eigen::VectorXd mu_p;
  double var_p;
  Eigen::VectorXd mu_q;
  double var_q;
};

/// Binary-classifier ratio estimate: the classifier separates source (class
/// 0) from target (class 1); the ratio is exp(affine score) corrected by the
/// class prior n0/n1 and clipped to [clip_min, clip_max].
struct LogisticRatioModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double prior_correction = 1.0;
  double clip_min = 1e-3;
  double clip_max = 1e3;
};

using RatioModel = std::variant<OracleGaussianRatio, LogisticRatioModel>;

double oracle_gaussian_ratio(const OracleGaussianRatio& model, const Eigen::VectorXd& z);

/// Fit the source-vs-target logistic classifier by full-batch gradient
/// descent: L2 penalty 1e-4 on the weights, zero initialization, step size
/// halved and the step retried whenever the loss would increase. Feature
/// matrices hold one point per row. Throws std::runtime_error if the loss
/// turns NaN.
LogisticRatioModel fit_logistic_ratio(const Eigen::MatrixXd& source_features,
                                      const Eigen::MatrixXd& target_features, int epochs,
                                      double learning_rate);

double eval_ratio(const RatioModel& model, const Eigen::VectorXd& z);

/// k distinct rows of `target_features` chosen uniformly without
/// replacement; deterministic under the seed. Requires 1 <= k <= rows.
Eigen::MatrixXd balanced_target_subsample(const Eigen::MatrixXd& target_features, int k,
                                          std::uint64_t seed);

/// Ratio evaluator on raw covariates: applies the feature map, then the
/// model.
RatioFn make_ratio_fn(RatioModel model, FeatureMap feature_map);

/// Regularized binary cross-entropy of the logistic classifier; labels are
/// 0/1 per row of X. Exposed for gradient checking.
double logistic_loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& labels,
                     const Eigen::VectorXd& weights, double bias, double l2_penalty);

struct LogisticGradient {
  Eigen::VectorXd weights;
  double bias;
};

LogisticGradient logistic_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& labels,
                                   const Eigen::VectorXd& weights, double bias,
                                   double l2_penalty);

}  // namespace mscp
