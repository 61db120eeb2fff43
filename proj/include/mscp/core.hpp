#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace mscp {

using FeatureVector = Eigen::VectorXd;

/// Likelihood-ratio evaluator w(x) = dQ/dP at a raw covariate; any feature
/// map is baked into the function. May return +infinity outside the
/// denominator's support.
using RatioFn = std::function<double(const FeatureVector&)>;

/// Response attached to a sample: a real value (regression), a class index
/// (classification), or a placeholder for unlabeled data. Reading a value
/// out of a placeholder, or reading the wrong kind, throws std::logic_error
/// so that unlabeled samples can never leak into score computations.
class Label {
 public:
  static Label real(double value);
  static Label cls(int index);
  static Label placeholder();

  bool is_real() const { return kind_ == Kind::Real; }
  bool is_class() const { return kind_ == Kind::Class; }
  bool is_placeholder() const { return kind_ == Kind::Placeholder; }

  double value() const;
  int class_index() const;

 private:
  enum class Kind { Real, Class, Placeholder };
  Label(Kind kind, double value, int index) : kind_(kind), value_(value), index_(index) {}

  Kind kind_;
  double value_;
  int index_;
};

struct LabeledSample {
  FeatureVector x;
  Label y;
};

enum class SplitRole { Train, Calibration, Unlabeled };

/// Samples drawn from one domain. domain_id 0 is the target, 1..K are the
/// sources. All feature vectors in one dataset share a dimension.
struct DomainDataset {
  int domain_id = 0;
  SplitRole role = SplitRole::Train;
  std::vector<LabeledSample> samples;

  int size() const { return static_cast<int>(samples.size()); }
  int dimension() const;
};

/// Feature map applied before density-ratio evaluation: either the identity
/// or an affine transform z = A x + b.
class FeatureMap {
 public:
  FeatureMap() = default;
  static FeatureMap identity() { return FeatureMap(); }
  static FeatureMap affine(Eigen::MatrixXd linear, Eigen::VectorXd offset);

  Eigen::VectorXd operator()(const FeatureVector& x) const;
  bool is_identity() const { return identity_; }
  int output_dimension(int input_dimension) const;

 private:
  bool identity_ = true;
  Eigen::MatrixXd linear_;
  Eigen::VectorXd offset_;
};

/// Absolute-residual nonconformity score |y - prediction|.
double score_abs_residual(double prediction, double y);

/// Classification nonconformity score 1 - probs[y]. probs must lie on the
/// probability simplex up to tolerance 1e-9.
double score_one_minus_prob(const Eigen::VectorXd& probs, int y);

/// Deterministic shuffle-then-cut split. The first part receives
/// round-half-up(train_fraction * n) samples and is tagged Train, the rest
/// Calibration. Requires at least 2 samples and a fraction in (0, 1) that
/// leaves both parts nonempty.
std::pair<DomainDataset, DomainDataset> split_dataset(const DomainDataset& data,
                                                      double train_fraction,
                                                      std::uint64_t seed);

/// Feature rows stacked into a matrix, one sample per row.
Eigen::MatrixXd feature_matrix(const std::vector<LabeledSample>& samples);

}  // namespace mscp
