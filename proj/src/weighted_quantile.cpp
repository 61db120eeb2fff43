#include "mscp/weighted_quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mscp {

WeightedScoreDistribution::WeightedScoreDistribution(std::vector<ScoreAtom> atoms,
                                                     double tail_mass)
    : tail_mass_(tail_mass) {
  if (!(tail_mass >= 0.0) || !std::isfinite(tail_mass)) {
    throw std::invalid_argument("WeightedScoreDistribution: tail mass must be finite and >= 0");
  }
  double total = tail_mass;
  for (const ScoreAtom& atom : atoms) {
    if (!std::isfinite(atom.score)) {
      throw std::invalid_argument("WeightedScoreDistribution: scores must be finite");
    }
    if (!(atom.mass >= 0.0) || !std::isfinite(atom.mass)) {
      throw std::invalid_argument("WeightedScoreDistribution: masses must be finite and >= 0");
    }
    total += atom.mass;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument("WeightedScoreDistribution: masses must sum to 1");
  }

  std::sort(atoms.begin(), atoms.end(),
            [](const ScoreAtom& a, const ScoreAtom& b) { return a.score < b.score; });
  atoms_.reserve(atoms.size());
  for (const ScoreAtom& atom : atoms) {
    if (!atoms_.empty() && atoms_.back().score == atom.score) {
      atoms_.back().mass += atom.mass;
    } else {
      atoms_.push_back(atom);
    }
  }

  cumulative_.resize(atoms_.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    cum += atoms_[i].mass;
    cumulative_[i] = cum;
  }
}

double WeightedScoreDistribution::quantile(double level) const {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("quantile: level must lie in (0, 1)");
  }
  const double needed = level - kCumulativeSlack;
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), needed);
  if (it == cumulative_.end()) return std::numeric_limits<double>::infinity();
  return atoms_[static_cast<std::size_t>(it - cumulative_.begin())].score;
}

NormalizedWeights normalize_weights(const std::vector<double>& calibration_ratios,
                                    double test_ratio) {
  if (!std::isfinite(test_ratio) || test_ratio < 0.0) {
    throw std::invalid_argument("normalize_weights: test ratio must be finite and >= 0");
  }
  double total = test_ratio;
  for (const double r : calibration_ratios) {
    if (!std::isfinite(r) || r < 0.0) {
      throw std::invalid_argument("normalize_weights: ratios must be finite and >= 0");
    }
    total += r;
  }
  if (total <= 0.0) {
    throw std::invalid_argument("normalize_weights: total weight must be positive");
  }

  NormalizedWeights out;
  out.calibration.reserve(calibration_ratios.size());
  for (const double r : calibration_ratios) out.calibration.push_back(r / total);
  out.test = test_ratio / total;
  return out;
}

double weighted_quantile(const WeightedScoreDistribution& dist, double level) {
  return dist.quantile(level);
}

}  // namespace mscp
