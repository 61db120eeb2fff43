#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mscp/core.hpp"

namespace mscp {

/// Multi-source regression surface: source k draws X ~ N(mu_k, sd_k^2 I)
/// and the target draws X ~ N(0, 0.5 I); the response is
///   Y = f(X) + sd(X) * eps,  f(X) = 1/(1+e^{|X_1|/2}) * 1/(1+e^{|X_2|/2}),
///   sd(X) = 1 + hetero_scale_sq / (1 + |X|_2).
struct RegressionDesign {
  int dimension = 2;
  double hetero_scale_sq = 0.0;
  std::vector<Eigen::VectorXd> source_means;
  std::vector<double> source_sds;

  static constexpr double kTargetVariance = 0.5;

  int num_sources() const { return static_cast<int>(source_means.size()); }
};

/// One-dimensional illustration: the target draws X ~ N(0, 9), the source
/// X ~ N(source_mean, 9), and Y = sigmoid(X) + 0.1 * eps for both.
struct ShiftedGaussianDesign {
  double source_mean = 0.0;
  double source_var = 9.0;
  double target_var = 9.0;
  double noise_sd = 0.1;
};

/// Latent-space classification task: class centers sit at separation * e_c
/// in R^C, every domain draws the covariate from a Gaussian mixture over the
/// centers with its own proportions (unit isotropic noise), and labels come
/// from the posterior under a uniform class prior, which is shared across
/// domains by construction.
struct LatentClassDesign {
  int num_classes = 2;
  double separation = 1.0;
  std::vector<Eigen::VectorXd> centers;
  /// Index 0 is the target, 1..K the sources; each row is a distribution
  /// over the class components.
  std::vector<Eigen::VectorXd> domain_proportions;

  int num_sources() const { return static_cast<int>(domain_proportions.size()) - 1; }
};

/// Per-source Gaussian parameters mu_k ~ Uniform[-1,1]^d, sd_k ~
/// Uniform[0.5, 1], i.i.d. under the seed.
std::pair<std::vector<Eigen::VectorXd>, std::vector<double>> sample_domain_params(
    int d, int num_sources, std::uint64_t seed);

RegressionDesign sample_regression_design(int d, int num_sources, double hetero_scale_sq,
                                          std::uint64_t seed);

double regression_mean(const FeatureVector& x);
double regression_noise_sd(const FeatureVector& x, double hetero_scale_sq);

/// Per-source calibration-plus-training totals: the pattern
/// [100,100,100,100,1000] scaled by floor(d/2) for 5 sources, repeated twice
/// for 10. Other source counts need explicit sizes.
std::vector<int> source_sizes(int d, int num_sources);

/// Draw from one domain of the regression design; domain_id 0 is the
/// target. Labels are attached only when `labeled` is set; otherwise the
/// dataset carries placeholder labels and the Unlabeled role.
DomainDataset sample_regression_domain(const RegressionDesign& design, int domain_id,
                                       int count, bool labeled, std::uint64_t seed);

/// Exact target-over-source density ratio for a source of the design.
RatioFn regression_oracle_ratio(const RegressionDesign& design, int source_id);

DomainDataset sample_shifted_domain(const ShiftedGaussianDesign& design, bool target,
                                    int count, bool labeled, std::uint64_t seed);

RatioFn shifted_oracle_ratio(const ShiftedGaussianDesign& design);

/// Design with mixing proportions drawn uniformly on the simplex for every
/// domain (or copied from the target when identical_proportions is set, the
/// shift-free control).
LatentClassDesign sample_latent_class_design(int num_sources, int num_classes,
                                             double separation, bool identical_proportions,
                                             std::uint64_t seed);

DomainDataset sample_latent_class_domain(const LatentClassDesign& design, int domain_id,
                                         int count, bool labeled, std::uint64_t seed);

/// P(Y = c | z) under the shared uniform-prior posterior.
Eigen::VectorXd latent_class_posterior(const LatentClassDesign& design,
                                       const FeatureVector& z);

/// Exact target-over-source mixture density ratio.
RatioFn latent_class_oracle_ratio(const LatentClassDesign& design, int source_id);

/// Convenience bundle: freshly sampled design and one labeled dataset per
/// domain, target first.
std::vector<DomainDataset> gen_classification_latent(int num_sources, int num_classes,
                                                     double separation, int per_domain,
                                                     std::uint64_t seed);

}  // namespace mscp
