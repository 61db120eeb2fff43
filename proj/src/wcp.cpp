#include "mscp/wcp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "mscp/weighted_quantile.hpp"

namespace mscp {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_simplex(const Eigen::VectorXd& probs) {
  if (probs.size() == 0) throw std::invalid_argument("probabilities must be nonempty");
  double total = 0.0;
  for (int i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!std::isfinite(p) || p < -kMassTolerance || p > 1.0 + kMassTolerance) {
      throw std::invalid_argument("probabilities must lie in [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument("probabilities must sum to 1");
  }
}

}  // namespace

CalibrationScores::CalibrationScores(std::vector<double> scores_in,
                                     std::vector<double> ratios_in)
    : scores(std::move(scores_in)), ratios(std::move(ratios_in)) {
  if (scores.empty()) throw std::invalid_argument("CalibrationScores: empty");
  if (scores.size() != ratios.size()) {
    throw std::invalid_argument("CalibrationScores: one ratio per score required");
  }
  for (const double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("CalibrationScores: scores must be finite");
  }
  for (const double r : ratios) {
    if (!std::isfinite(r) || r < 0.0) {
      throw std::invalid_argument("CalibrationScores: ratios must be finite and >= 0");
    }
  }
}

PredictionSet PredictionSet::interval(double center, double radius) {
  if (!std::isfinite(center)) throw std::invalid_argument("PredictionSet: center must be finite");
  if (std::isnan(radius) || radius < 0.0) {
    throw std::invalid_argument("PredictionSet: radius must be >= 0");
  }
  PredictionSet set(Kind::Single);
  set.center_ = center;
  set.radius_ = radius;
  set.level_ = kNan;
  return set;
}

PredictionSet PredictionSet::interval_union(std::vector<Interval> parts) {
  double previous_hi = -kInf;
  bool first = true;
  for (const Interval& part : parts) {
    if (std::isnan(part.lo) || std::isnan(part.hi) || part.lo > part.hi) {
      throw std::invalid_argument("PredictionSet: malformed interval");
    }
    if (!first && part.lo <= previous_hi) {
      throw std::invalid_argument("PredictionSet: intervals must be disjoint and sorted");
    }
    previous_hi = part.hi;
    first = false;
  }
  PredictionSet set(Kind::Union);
  set.parts_ = std::move(parts);
  set.level_ = kNan;
  return set;
}

PredictionSet PredictionSet::labels(std::vector<int> members, int num_classes) {
  if (num_classes <= 0) throw std::invalid_argument("PredictionSet: num_classes must be > 0");
  std::sort(members.begin(), members.end());
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i] < 0 || members[i] >= num_classes) {
      throw std::invalid_argument("PredictionSet: label out of range");
    }
    if (i > 0 && members[i] == members[i - 1]) {
      throw std::invalid_argument("PredictionSet: duplicate label");
    }
  }
  PredictionSet set(Kind::Labels);
  set.members_ = std::move(members);
  set.num_classes_ = num_classes;
  set.level_ = kNan;
  return set;
}

PredictionSet PredictionSet::with_level(double level) const {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("PredictionSet: level must lie in (0, 1)");
  }
  PredictionSet tagged = *this;
  tagged.level_ = level;
  return tagged;
}

bool PredictionSet::contains(double y) const {
  if (kind_ == Kind::Labels) throw std::logic_error("PredictionSet: label set holds no reals");
  if (!std::isfinite(y)) throw std::invalid_argument("PredictionSet: query must be finite");
  if (kind_ == Kind::Single) return std::abs(y - center_) <= radius_;
  for (const Interval& part : parts_) {
    if (part.lo <= y && y <= part.hi) return true;
  }
  return false;
}

bool PredictionSet::contains_label(int label) const {
  if (kind_ != Kind::Labels) throw std::logic_error("PredictionSet: not a label set");
  return std::binary_search(members_.begin(), members_.end(), label);
}

double PredictionSet::length() const {
  if (kind_ == Kind::Labels) throw std::logic_error("PredictionSet: label set has no length");
  if (kind_ == Kind::Single) return 2.0 * radius_;
  double total = 0.0;
  for (const Interval& part : parts_) total += part.hi - part.lo;
  return total;
}

bool PredictionSet::is_finite() const {
  if (kind_ == Kind::Labels) return true;
  return std::isfinite(length());
}

double PredictionSet::center() const {
  if (kind_ != Kind::Single) throw std::logic_error("PredictionSet: not a single interval");
  return center_;
}

double PredictionSet::radius() const {
  if (kind_ != Kind::Single) throw std::logic_error("PredictionSet: not a single interval");
  return radius_;
}

std::vector<Interval> PredictionSet::intervals() const {
  if (kind_ == Kind::Labels) throw std::logic_error("PredictionSet: label set has no intervals");
  if (kind_ == Kind::Union) return parts_;
  return {Interval{center_ - radius_, center_ + radius_}};
}

const std::vector<int>& PredictionSet::members() const {
  if (kind_ != Kind::Labels) throw std::logic_error("PredictionSet: not a label set");
  return members_;
}

int PredictionSet::num_classes() const {
  if (kind_ != Kind::Labels) throw std::logic_error("PredictionSet: not a label set");
  return num_classes_;
}

bool PredictionSet::has_level() const { return !std::isnan(level_); }

double wcp_threshold(const CalibrationScores& calibration, double test_ratio, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("wcp_threshold: alpha must lie in (0, 1)");
  }
  const NormalizedWeights weights = normalize_weights(calibration.ratios, test_ratio);
  std::vector<ScoreAtom> atoms;
  atoms.reserve(calibration.scores.size());
  for (std::size_t i = 0; i < calibration.scores.size(); ++i) {
    atoms.push_back(ScoreAtom{calibration.scores[i], weights.calibration[i]});
  }
  return WeightedScoreDistribution(std::move(atoms), weights.test).quantile(1.0 - alpha);
}

PredictionSet wcp_interval_regression(double prediction, double threshold) {
  if (std::isnan(threshold) || threshold < 0.0) {
    throw std::invalid_argument("wcp_interval_regression: threshold must be >= 0");
  }
  return PredictionSet::interval(prediction, threshold);
}

PredictionSet wcp_set_classification(const Eigen::VectorXd& probs, double threshold) {
  check_simplex(probs);
  if (std::isnan(threshold)) {
    throw std::invalid_argument("wcp_set_classification: threshold must not be NaN");
  }
  std::vector<int> members;
  for (int c = 0; c < probs.size(); ++c) {
    if (1.0 - probs[c] <= threshold) members.push_back(c);
  }
  return PredictionSet::labels(std::move(members), static_cast<int>(probs.size()));
}

double weighted_p_value(const CalibrationScores& calibration, double test_ratio,
                        double test_score) {
  if (!std::isfinite(test_score)) {
    throw std::invalid_argument("weighted_p_value: test score must be finite");
  }
  if (!std::isfinite(test_ratio) || test_ratio < 0.0) {
    throw std::invalid_argument("weighted_p_value: test ratio must be finite and >= 0");
  }
  double above = test_ratio;
  double total = test_ratio;
  for (std::size_t i = 0; i < calibration.scores.size(); ++i) {
    total += calibration.ratios[i];
    if (calibration.scores[i] >= test_score) above += calibration.ratios[i];
  }
  if (total <= 0.0) throw std::invalid_argument("weighted_p_value: total weight must be positive");
  return above / total;
}

}  // namespace mscp
