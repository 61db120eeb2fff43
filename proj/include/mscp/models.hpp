#pragma once

#include <vector>

#include <Eigen/Core>

#include "mscp/core.hpp"

namespace mscp {

/// RBF kernel ridge regressor; prediction is sum_i c_i k(x, x_i) with
/// k(a, b) = exp(-|a - b|^2 / (2 bandwidth^2)).
struct KernelRidgeModel {
  Eigen::MatrixXd support_points;
  Eigen::VectorXd dual_coefficients;
  double bandwidth = 1.0;
  double ridge = 1e-2;
};

/// Median of all pairwise Euclidean distances; requires >= 2 rows.
double median_pairwise_distance(const Eigen::MatrixXd& points);

/// Solve (G + ridge I) c = y by Cholesky. bandwidth <= 0 selects the median
/// heuristic (falling back to 1 when all points coincide). On factorization
/// failure the ridge is multiplied by 10, up to 3 attempts.
KernelRidgeModel fit_kernel_ridge(const std::vector<LabeledSample>& train,
                                  double bandwidth = 0.0, double ridge = 1e-2);

double predict_kernel_ridge(const KernelRidgeModel& model, const FeatureVector& x);

/// Multinomial logistic classifier with class scores W x + b.
struct SoftmaxModel {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

/// Cross-entropy fit by full-batch gradient descent from zero
/// initialization, halving the step and retrying whenever the loss would
/// increase. Every class in [0, num_classes) must appear in the training
/// set.
SoftmaxModel fit_softmax(const std::vector<LabeledSample>& train, int num_classes,
                         int epochs = 500, double learning_rate = 0.5);

/// Class-probability vector softmax(W x + b).
Eigen::VectorXd predict_softmax(const SoftmaxModel& model, const FeatureVector& x);

/// Mean cross-entropy of the affine softmax scores; exposed for gradient
/// checking. Labels are class indices, one per row of X.
double softmax_loss(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                    const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias);

struct SoftmaxGradient {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

SoftmaxGradient softmax_gradient(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                                 const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias);

}  // namespace mscp
