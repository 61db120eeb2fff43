#include "mscp/core.hpp"

#include <cmath>
#include <stdexcept>

#include "mscp/rng.hpp"

namespace mscp {

Label Label::real(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("Label::real: value must be finite");
  return Label(Kind::Real, value, -1);
}

Label Label::cls(int index) {
  if (index < 0) throw std::invalid_argument("Label::cls: index must be nonnegative");
  return Label(Kind::Class, 0.0, index);
}

Label Label::placeholder() { return Label(Kind::Placeholder, 0.0, -1); }

double Label::value() const {
  if (kind_ != Kind::Real) throw std::logic_error("Label::value: label is not a real response");
  return value_;
}

int Label::class_index() const {
  if (kind_ != Kind::Class) throw std::logic_error("Label::class_index: label is not a class");
  return index_;
}

int DomainDataset::dimension() const {
  if (samples.empty()) throw std::invalid_argument("DomainDataset::dimension: empty dataset");
  return static_cast<int>(samples.front().x.size());
}

FeatureMap FeatureMap::affine(Eigen::MatrixXd linear, Eigen::VectorXd offset) {
  if (linear.rows() == 0 || linear.cols() == 0) {
    throw std::invalid_argument("FeatureMap::affine: empty transform");
  }
  if (linear.rows() != offset.size()) {
    throw std::invalid_argument("FeatureMap::affine: offset size must match rows of transform");
  }
  FeatureMap map;
  map.identity_ = false;
  map.linear_ = std::move(linear);
  map.offset_ = std::move(offset);
  return map;
}

Eigen::VectorXd FeatureMap::operator()(const FeatureVector& x) const {
  if (identity_) return x;
  if (x.size() != linear_.cols()) {
    throw std::invalid_argument("FeatureMap: input dimension mismatch");
  }
  return linear_ * x + offset_;
}

int FeatureMap::output_dimension(int input_dimension) const {
  return identity_ ? input_dimension : static_cast<int>(linear_.rows());
}

double score_abs_residual(double prediction, double y) {
  if (!std::isfinite(prediction) || !std::isfinite(y)) {
    throw std::invalid_argument("score_abs_residual: arguments must be finite");
  }
  return std::abs(y - prediction);
}

double score_one_minus_prob(const Eigen::VectorXd& probs, int y) {
  constexpr double kSimplexTolerance = 1e-9;
  if (probs.size() == 0) throw std::invalid_argument("score_one_minus_prob: empty probabilities");
  if (y < 0 || y >= probs.size()) {
    throw std::invalid_argument("score_one_minus_prob: class index out of range");
  }
  double total = 0.0;
  for (int i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!std::isfinite(p) || p < -kSimplexTolerance || p > 1.0 + kSimplexTolerance) {
      throw std::invalid_argument("score_one_minus_prob: probabilities outside [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw std::invalid_argument("score_one_minus_prob: probabilities must sum to 1");
  }
  return 1.0 - probs[y];
}

std::pair<DomainDataset, DomainDataset> split_dataset(const DomainDataset& data,
                                                      double train_fraction,
                                                      std::uint64_t seed) {
  const int n = data.size();
  if (n < 2) throw std::invalid_argument("split_dataset: need at least 2 samples");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split_dataset: train_fraction must lie in (0, 1)");
  }
  const int n_train = static_cast<int>(std::floor(train_fraction * n + 0.5));
  if (n_train < 1 || n_train >= n) {
    throw std::invalid_argument("split_dataset: fraction leaves an empty part");
  }

  Rng rng(seed);
  const std::vector<int> perm = random_permutation(n, rng);

  DomainDataset train;
  train.domain_id = data.domain_id;
  train.role = SplitRole::Train;
  DomainDataset calibration;
  calibration.domain_id = data.domain_id;
  calibration.role = SplitRole::Calibration;

  train.samples.reserve(n_train);
  calibration.samples.reserve(n - n_train);
  for (int i = 0; i < n; ++i) {
    (i < n_train ? train : calibration).samples.push_back(data.samples[perm[i]]);
  }
  return {std::move(train), std::move(calibration)};
}

Eigen::MatrixXd feature_matrix(const std::vector<LabeledSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("feature_matrix: empty sample list");
  const auto dim = samples.front().x.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(samples.size()), dim);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    if (samples[static_cast<std::size_t>(i)].x.size() != dim) {
      throw std::invalid_argument("feature_matrix: inconsistent dimensions");
    }
    out.row(i) = samples[static_cast<std::size_t>(i)].x.transpose();
  }
  return out;
}

}  // namespace mscp
