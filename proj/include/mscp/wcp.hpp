#pragma once

#include <vector>

#include <Eigen/Core>

namespace mscp {

/// Calibration nonconformity scores with their density-ratio weights.
/// Scores are finite, ratios finite and nonnegative, one ratio per score.
struct CalibrationScores {
  CalibrationScores(std::vector<double> scores_in, std::vector<double> ratios_in);

  std::vector<double> scores;
  std::vector<double> ratios;

  int size() const { return static_cast<int>(scores.size()); }
};

/// Closed interval [lo, hi]; endpoints may be infinite.
struct Interval {
  double lo;
  double hi;
};

/// Prediction set in one of three shapes: a single interval given by center
/// and radius, a finite union of disjoint closed intervals, or a subset of
/// class labels. A set optionally carries the confidence level it was built
/// at, which downstream merging uses to check caller contracts.
class PredictionSet {
 public:
  static PredictionSet interval(double center, double radius);
  static PredictionSet interval_union(std::vector<Interval> parts);
  static PredictionSet labels(std::vector<int> members, int num_classes);

  PredictionSet with_level(double level) const;

  bool is_interval() const { return kind_ == Kind::Single; }
  bool is_interval_union() const { return kind_ == Kind::Union; }
  bool is_labels() const { return kind_ == Kind::Labels; }
  bool is_real_valued() const { return kind_ != Kind::Labels; }

  bool contains(double y) const;
  bool contains_label(int label) const;

  /// Total length of a real-valued set (+infinity when unbounded).
  double length() const;
  /// True when the set has finite total length; label sets always qualify.
  bool is_finite() const;

  double center() const;
  double radius() const;
  /// The set as a list of disjoint closed intervals (real-valued kinds).
  std::vector<Interval> intervals() const;
  const std::vector<int>& members() const;
  int num_classes() const;

  bool has_level() const;
  double level() const { return level_; }

 private:
  enum class Kind { Single, Union, Labels };
  explicit PredictionSet(Kind kind) : kind_(kind) {}

  Kind kind_;
  double center_ = 0.0;
  double radius_ = 0.0;
  std::vector<Interval> parts_;
  std::vector<int> members_;
  int num_classes_ = 0;
  double level_;
};

/// Score threshold of weighted conformal prediction: the (1 - alpha)
/// quantile of the calibration scores weighted by their normalized ratios,
/// with the test point's weight placed at +infinity. Returns +infinity when
/// the finite mass cannot reach the level.
double wcp_threshold(const CalibrationScores& calibration, double test_ratio, double alpha);

/// Interval {y : |y - prediction| <= threshold}.
PredictionSet wcp_interval_regression(double prediction, double threshold);

/// Label set {c : 1 - probs[c] <= threshold} for probs on the simplex.
PredictionSet wcp_set_classification(const Eigen::VectorXd& probs, double threshold);

/// Weighted conformal p-value
///   (sum of weights of calibration scores >= test_score + test weight)
///   / (total weight).
/// Larger test scores give smaller p-values; p > alpha exactly when
/// test_score <= wcp_threshold(calibration, test_ratio, alpha).
double weighted_p_value(const CalibrationScores& calibration, double test_ratio,
                        double test_score);

}  // namespace mscp
