#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mscp/core.hpp"
#include "mscp/wcp.hpp"

namespace mscp {

/// Nonconformity score of a candidate pair.
using ScoreFn = std::function<double(const FeatureVector&, const Label&)>;

/// Builds the prediction set {y : score(x, y) <= threshold} for a test
/// covariate, closing over whatever predictor the score uses.
using InvertFn = std::function<PredictionSet(const FeatureVector&, double)>;

/// Calibration samples of several sources concatenated and shuffled.
struct PooledCalibration {
  std::vector<LabeledSample> samples;
  std::vector<int> source_sizes;
  std::uint64_t permutation_seed = 0;

  int size() const { return static_cast<int>(samples.size()); }
};

/// Convex weights over mixture components: nonnegative, summing to 1.
class MixtureWeights {
 public:
  explicit MixtureWeights(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  std::vector<double> values_;
};

/// Shuffle the concatenation of K nonempty calibration sets with a seeded
/// permutation, recording the per-source sizes.
PooledCalibration pool_calibration(const std::vector<DomainDataset>& cal_sets,
                                   std::uint64_t seed);

/// Proportions n_k / n of the pooled calibration sizes; these are the
/// mixture weights the pooled target-over-mixture ratio must use.
MixtureWeights pooling_proportions(const std::vector<int>& source_sizes);

/// Ratio of the target density to the lambda-mixture of source densities,
/// assembled from the per-source ratios w_k = dQ/dP_k via the harmonic
/// identity w(z) = 1 / (sum_k lambda_k / w_k(z)). Components may return
/// +infinity (z outside that source's support); a z outside every source's
/// support raises std::domain_error.
RatioFn mixture_ratio_from_components(std::vector<RatioFn> component_ratios,
                                      const MixtureWeights& weights);

/// Weighted conformal set from an arbitrary calibration sample and ratio
/// function: scores each sample, weights it by ratio_fn at its covariate,
/// thresholds at level 1 - alpha, and inverts. Shared by the pooled and
/// hierarchical constructions.
PredictionSet weighted_conformal_set(const std::vector<LabeledSample>& calibration,
                                     const RatioFn& ratio_fn, const ScoreFn& score_fn,
                                     const InvertFn& invert_fn, const FeatureVector& x,
                                     double alpha);

/// Pooled weighted conformal prediction: one conformal pass over the pooled
/// calibration sample with the target-over-mixture ratio.
PredictionSet pooled_wcp_set(const PooledCalibration& pooled, const RatioFn& mixture_ratio,
                             const ScoreFn& score_fn, const InvertFn& invert_fn,
                             const FeatureVector& x, double alpha);

/// Empirical domain proportions from indices in [1, num_domains]: tau_k =
/// count(k) / N. Domains absent from the draw get weight zero.
MixtureWeights estimate_tau(const std::vector<int>& domain_indices, int num_domains);

/// Clip estimated proportions away from zero at eps = 1/n2 and renormalize:
/// beta_k = max(tau_k, eps) / sum_j max(tau_j, eps). Every output entry is
/// at least eps / (1 + K * eps).
MixtureWeights adjusted_beta(const MixtureWeights& tau_hat, int n2);

/// Hierarchical pooled set: the mixture ratio is rebuilt from per-domain
/// ratios with the adjusted weights beta (estimated on held-out draws), then
/// applied to the disjoint calibration half d1.
PredictionSet hierarchical_pooled_set(const std::vector<LabeledSample>& d1,
                                      const MixtureWeights& beta,
                                      const std::vector<RatioFn>& component_ratios,
                                      const ScoreFn& score_fn, const InvertFn& invert_fn,
                                      const FeatureVector& x, double alpha);

/// Lower bound 1 - C(2n, n) / 4^n on the total-variation distance between
/// the pooled joint law and its i.i.d. counterpart in the two-domain
/// balanced example; strictly increasing, approaching 1.
double tv_lower_bound(int n);

}  // namespace mscp
