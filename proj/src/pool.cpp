#include "mscp/pool.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "mscp/rng.hpp"
#include "mscp/weighted_quantile.hpp"

namespace mscp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MixtureWeights::MixtureWeights(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("MixtureWeights: empty");
  double total = 0.0;
  for (const double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("MixtureWeights: entries must be finite and >= 0");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument("MixtureWeights: entries must sum to 1");
  }
}

PooledCalibration pool_calibration(const std::vector<DomainDataset>& cal_sets,
                                   std::uint64_t seed) {
  if (cal_sets.empty()) throw std::invalid_argument("pool_calibration: no calibration sets");

  PooledCalibration pooled;
  pooled.permutation_seed = seed;
  for (const DomainDataset& set : cal_sets) {
    if (set.samples.empty()) {
      throw std::invalid_argument("pool_calibration: empty calibration set");
    }
    pooled.source_sizes.push_back(set.size());
    pooled.samples.insert(pooled.samples.end(), set.samples.begin(), set.samples.end());
  }

  Rng rng(seed);
  const std::vector<int> perm = random_permutation(pooled.size(), rng);
  std::vector<LabeledSample> shuffled;
  shuffled.reserve(pooled.samples.size());
  for (const int i : perm) shuffled.push_back(pooled.samples[static_cast<std::size_t>(i)]);
  pooled.samples = std::move(shuffled);
  return pooled;
}

MixtureWeights pooling_proportions(const std::vector<int>& source_sizes) {
  if (source_sizes.empty()) throw std::invalid_argument("pooling_proportions: no sizes");
  double total = 0.0;
  for (const int n : source_sizes) {
    if (n <= 0) throw std::invalid_argument("pooling_proportions: sizes must be positive");
    total += static_cast<double>(n);
  }
  std::vector<double> values;
  values.reserve(source_sizes.size());
  for (const int n : source_sizes) values.push_back(static_cast<double>(n) / total);
  return MixtureWeights(std::move(values));
}

RatioFn mixture_ratio_from_components(std::vector<RatioFn> component_ratios,
                                      const MixtureWeights& weights) {
  if (component_ratios.empty()) {
    throw std::invalid_argument("mixture_ratio_from_components: no components");
  }
  if (static_cast<int>(component_ratios.size()) != weights.size()) {
    throw std::invalid_argument("mixture_ratio_from_components: one weight per component");
  }
  return [components = std::move(component_ratios),
          lambdas = weights.values()](const FeatureVector& z) -> double {
    double denom = 0.0;
    for (std::size_t k = 0; k < components.size(); ++k) {
      if (lambdas[k] == 0.0) continue;
      const double w = components[k](z);
      if (std::isnan(w) || w < 0.0) {
        throw std::runtime_error("mixture ratio: component returned a negative or NaN value");
      }
      if (w == 0.0) return 0.0;
      if (w == kInf) continue;
      denom += lambdas[k] / w;
    }
    if (denom == 0.0) {
      throw std::domain_error("mixture ratio: point outside the support of every component");
    }
    return 1.0 / denom;
  };
}

PredictionSet weighted_conformal_set(const std::vector<LabeledSample>& calibration,
                                     const RatioFn& ratio_fn, const ScoreFn& score_fn,
                                     const InvertFn& invert_fn, const FeatureVector& x,
                                     double alpha) {
  if (calibration.empty()) throw std::invalid_argument("weighted_conformal_set: empty calibration");
  std::vector<double> scores;
  std::vector<double> ratios;
  scores.reserve(calibration.size());
  ratios.reserve(calibration.size());
  for (const LabeledSample& sample : calibration) {
    scores.push_back(score_fn(sample.x, sample.y));
    ratios.push_back(ratio_fn(sample.x));
  }
  const double threshold =
      wcp_threshold(CalibrationScores(std::move(scores), std::move(ratios)), ratio_fn(x), alpha);
  return invert_fn(x, threshold);
}

PredictionSet pooled_wcp_set(const PooledCalibration& pooled, const RatioFn& mixture_ratio,
                             const ScoreFn& score_fn, const InvertFn& invert_fn,
                             const FeatureVector& x, double alpha) {
  return weighted_conformal_set(pooled.samples, mixture_ratio, score_fn, invert_fn, x, alpha);
}

MixtureWeights estimate_tau(const std::vector<int>& domain_indices, int num_domains) {
  if (domain_indices.empty()) throw std::invalid_argument("estimate_tau: empty index list");
  if (num_domains < 1) throw std::invalid_argument("estimate_tau: num_domains must be >= 1");
  std::vector<double> counts(static_cast<std::size_t>(num_domains), 0.0);
  for (const int k : domain_indices) {
    if (k < 1 || k > num_domains) throw std::invalid_argument("estimate_tau: index out of range");
    counts[static_cast<std::size_t>(k - 1)] += 1.0;
  }
  const double n = static_cast<double>(domain_indices.size());
  for (double& c : counts) c /= n;
  return MixtureWeights(std::move(counts));
}

MixtureWeights adjusted_beta(const MixtureWeights& tau_hat, int n2) {
  if (n2 < 1) throw std::invalid_argument("adjusted_beta: n2 must be >= 1");
  const double eps = 1.0 / static_cast<double>(n2);
  std::vector<double> clipped = tau_hat.values();
  double total = 0.0;
  for (double& v : clipped) {
    v = std::max(v, eps);
    total += v;
  }
  for (double& v : clipped) v /= total;
  return MixtureWeights(std::move(clipped));
}

PredictionSet hierarchical_pooled_set(const std::vector<LabeledSample>& d1,
                                      const MixtureWeights& beta,
                                      const std::vector<RatioFn>& component_ratios,
                                      const ScoreFn& score_fn, const InvertFn& invert_fn,
                                      const FeatureVector& x, double alpha) {
  if (d1.empty()) throw std::invalid_argument("hierarchical_pooled_set: empty calibration half");
  const RatioFn adjusted = mixture_ratio_from_components(component_ratios, beta);
  return weighted_conformal_set(d1, adjusted, score_fn, invert_fn, x, alpha);
}

double tv_lower_bound(int n) {
  if (n < 1) throw std::invalid_argument("tv_lower_bound: n must be >= 1");
  // C(2n, n) / 4^n = prod_{j=1..n} (2j - 1) / (2j), stable for large n.
  double central = 1.0;
  for (int j = 1; j <= n; ++j) {
    central *= (2.0 * j - 1.0) / (2.0 * j);
  }
  return 1.0 - central;
}

}  // namespace mscp
