#include "mscp/datagen.hpp"

#include <cmath>
#include <stdexcept>

#include "mscp/ratio.hpp"
#include "mscp/rng.hpp"

namespace mscp {

namespace {

int discrete_index(const Eigen::VectorXd& probs, double u) {
  double cum = 0.0;
  for (int c = 0; c < probs.size(); ++c) {
    cum += probs[c];
    if (u < cum) return c;
  }
  return static_cast<int>(probs.size()) - 1;
}

Eigen::VectorXd simplex_uniform(int dim, Rng& rng) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = -std::log1p(-rng.uniform());
  return v / v.sum();
}

/// The one label-generation path for the latent classification task; being
/// shared by every domain is what makes P(Y | Z) domain-invariant.
int draw_latent_label(const LatentClassDesign& design, const Eigen::VectorXd& z, Rng& rng) {
  return discrete_index(latent_class_posterior(design, z), rng.uniform());
}

void check_regression_design(const RegressionDesign& design) {
  if (design.dimension < 2) {
    throw std::invalid_argument("regression design: dimension must be >= 2");
  }
  if (design.hetero_scale_sq < 0.0) {
    throw std::invalid_argument("regression design: hetero scale must be >= 0");
  }
  if (design.source_means.size() != design.source_sds.size() || design.source_means.empty()) {
    throw std::invalid_argument("regression design: one sd per source mean required");
  }
}

}  // namespace

std::pair<std::vector<Eigen::VectorXd>, std::vector<double>> sample_domain_params(
    int d, int num_sources, std::uint64_t seed) {
  if (d < 1 || num_sources < 1) {
    throw std::invalid_argument("sample_domain_params: d and source count must be >= 1");
  }
  Rng rng(seed);
  std::vector<Eigen::VectorXd> means;
  std::vector<double> sds;
  means.reserve(static_cast<std::size_t>(num_sources));
  sds.reserve(static_cast<std::size_t>(num_sources));
  for (int k = 0; k < num_sources; ++k) {
    Eigen::VectorXd mu(d);
    for (int i = 0; i < d; ++i) mu[i] = rng.uniform(-1.0, 1.0);
    means.push_back(std::move(mu));
    sds.push_back(rng.uniform(0.5, 1.0));
  }
  return {std::move(means), std::move(sds)};
}

RegressionDesign sample_regression_design(int d, int num_sources, double hetero_scale_sq,
                                          std::uint64_t seed) {
  RegressionDesign design;
  design.dimension = d;
  design.hetero_scale_sq = hetero_scale_sq;
  auto [means, sds] = sample_domain_params(d, num_sources, seed);
  design.source_means = std::move(means);
  design.source_sds = std::move(sds);
  check_regression_design(design);
  return design;
}

double regression_mean(const FeatureVector& x) {
  if (x.size() < 2) throw std::invalid_argument("regression_mean: needs at least 2 coordinates");
  return 1.0 / (1.0 + std::exp(std::abs(x[0]) / 2.0)) /
         (1.0 + std::exp(std::abs(x[1]) / 2.0));
}

double regression_noise_sd(const FeatureVector& x, double hetero_scale_sq) {
  if (hetero_scale_sq < 0.0) {
    throw std::invalid_argument("regression_noise_sd: hetero scale must be >= 0");
  }
  return 1.0 + hetero_scale_sq / (1.0 + x.norm());
}

std::vector<int> source_sizes(int d, int num_sources) {
  if (d < 2) throw std::invalid_argument("source_sizes: d must be >= 2");
  if (num_sources != 5 && num_sources != 10) {
    throw std::invalid_argument("source_sizes: built-in sizes exist for 5 or 10 sources only");
  }
  const int scale = d / 2;
  const int pattern[5] = {100, 100, 100, 100, 1000};
  std::vector<int> sizes;
  sizes.reserve(static_cast<std::size_t>(num_sources));
  for (int k = 0; k < num_sources; ++k) sizes.push_back(pattern[k % 5] * scale);
  return sizes;
}

DomainDataset sample_regression_domain(const RegressionDesign& design, int domain_id,
                                       int count, bool labeled, std::uint64_t seed) {
  check_regression_design(design);
  if (domain_id < 0 || domain_id > design.num_sources()) {
    throw std::invalid_argument("sample_regression_domain: domain_id out of range");
  }
  if (count < 1) throw std::invalid_argument("sample_regression_domain: count must be >= 1");

  const bool target = domain_id == 0;
  const Eigen::VectorXd mean = target ? Eigen::VectorXd::Zero(design.dimension).eval()
                                      : design.source_means[static_cast<std::size_t>(domain_id - 1)];
  const double sd = target ? std::sqrt(RegressionDesign::kTargetVariance)
                           : design.source_sds[static_cast<std::size_t>(domain_id - 1)];

  Rng rng(seed);
  DomainDataset data;
  data.domain_id = domain_id;
  data.role = labeled ? SplitRole::Train : SplitRole::Unlabeled;
  data.samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const Eigen::VectorXd x = mean + sd * rng.gaussian_vector(design.dimension);
    Label y = Label::placeholder();
    if (labeled) {
      y = Label::real(regression_mean(x) +
                      regression_noise_sd(x, design.hetero_scale_sq) * rng.gaussian());
    }
    data.samples.push_back(LabeledSample{x, y});
  }
  return data;
}

RatioFn regression_oracle_ratio(const RegressionDesign& design, int source_id) {
  check_regression_design(design);
  if (source_id < 1 || source_id > design.num_sources()) {
    throw std::invalid_argument("regression_oracle_ratio: source_id out of range");
  }
  OracleGaussianRatio oracle;
  oracle.mu_p = design.source_means[static_cast<std::size_t>(source_id - 1)];
  const double sd = design.source_sds[static_cast<std::size_t>(source_id - 1)];
  oracle.var_p = sd * sd;
  oracle.mu_q = Eigen::VectorXd::Zero(design.dimension);
  oracle.var_q = RegressionDesign::kTargetVariance;
  return make_ratio_fn(RatioModel(std::move(oracle)), FeatureMap::identity());
}

DomainDataset sample_shifted_domain(const ShiftedGaussianDesign& design, bool target,
                                    int count, bool labeled, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_shifted_domain: count must be >= 1");
  if (design.source_var <= 0.0 || design.target_var <= 0.0 || design.noise_sd < 0.0) {
    throw std::invalid_argument("sample_shifted_domain: malformed design");
  }
  const double mean = target ? 0.0 : design.source_mean;
  const double sd = std::sqrt(target ? design.target_var : design.source_var);

  Rng rng(seed);
  DomainDataset data;
  data.domain_id = target ? 0 : 1;
  data.role = labeled ? SplitRole::Train : SplitRole::Unlabeled;
  data.samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd x(1);
    x[0] = mean + sd * rng.gaussian();
    Label y = Label::placeholder();
    if (labeled) {
      y = Label::real(1.0 / (1.0 + std::exp(-x[0])) + design.noise_sd * rng.gaussian());
    }
    data.samples.push_back(LabeledSample{std::move(x), y});
  }
  return data;
}

RatioFn shifted_oracle_ratio(const ShiftedGaussianDesign& design) {
  OracleGaussianRatio oracle;
  oracle.mu_p = Eigen::VectorXd::Constant(1, design.source_mean);
  oracle.var_p = design.source_var;
  oracle.mu_q = Eigen::VectorXd::Zero(1);
  oracle.var_q = design.target_var;
  return make_ratio_fn(RatioModel(std::move(oracle)), FeatureMap::identity());
}

LatentClassDesign sample_latent_class_design(int num_sources, int num_classes,
                                             double separation, bool identical_proportions,
                                             std::uint64_t seed) {
  if (num_sources < 2 || num_classes < 2) {
    throw std::invalid_argument("sample_latent_class_design: need >= 2 sources and classes");
  }
  if (separation < 0.0) {
    throw std::invalid_argument("sample_latent_class_design: separation must be >= 0");
  }

  LatentClassDesign design;
  design.num_classes = num_classes;
  design.separation = separation;
  design.centers.reserve(static_cast<std::size_t>(num_classes));
  for (int c = 0; c < num_classes; ++c) {
    Eigen::VectorXd center = Eigen::VectorXd::Zero(num_classes);
    center[c] = separation;
    design.centers.push_back(std::move(center));
  }

  Rng rng(seed);
  design.domain_proportions.reserve(static_cast<std::size_t>(num_sources + 1));
  design.domain_proportions.push_back(simplex_uniform(num_classes, rng));
  for (int k = 1; k <= num_sources; ++k) {
    design.domain_proportions.push_back(
        identical_proportions ? design.domain_proportions.front()
                              : simplex_uniform(num_classes, rng));
  }
  return design;
}

DomainDataset sample_latent_class_domain(const LatentClassDesign& design, int domain_id,
                                         int count, bool labeled, std::uint64_t seed) {
  if (domain_id < 0 || domain_id > design.num_sources()) {
    throw std::invalid_argument("sample_latent_class_domain: domain_id out of range");
  }
  if (count < 1) throw std::invalid_argument("sample_latent_class_domain: count must be >= 1");

  const Eigen::VectorXd& proportions =
      design.domain_proportions[static_cast<std::size_t>(domain_id)];
  Rng rng(seed);
  DomainDataset data;
  data.domain_id = domain_id;
  data.role = labeled ? SplitRole::Train : SplitRole::Unlabeled;
  data.samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int component = discrete_index(proportions, rng.uniform());
    const Eigen::VectorXd z =
        design.centers[static_cast<std::size_t>(component)] +
        rng.gaussian_vector(design.num_classes);
    Label y = Label::placeholder();
    if (labeled) y = Label::cls(draw_latent_label(design, z, rng));
    data.samples.push_back(LabeledSample{z, y});
  }
  return data;
}

Eigen::VectorXd latent_class_posterior(const LatentClassDesign& design,
                                       const FeatureVector& z) {
  if (z.size() != design.num_classes) {
    throw std::invalid_argument("latent_class_posterior: dimension mismatch");
  }
  Eigen::VectorXd log_lik(design.num_classes);
  for (int c = 0; c < design.num_classes; ++c) {
    log_lik[c] = -0.5 * (z - design.centers[static_cast<std::size_t>(c)]).squaredNorm();
  }
  const Eigen::VectorXd shifted = (log_lik.array() - log_lik.maxCoeff()).exp();
  return shifted / shifted.sum();
}

RatioFn latent_class_oracle_ratio(const LatentClassDesign& design, int source_id) {
  if (source_id < 1 || source_id > design.num_sources()) {
    throw std::invalid_argument("latent_class_oracle_ratio: source_id out of range");
  }
  return [design, source_id](const FeatureVector& z) -> double {
    if (z.size() != design.num_classes) {
      throw std::invalid_argument("latent class ratio: dimension mismatch");
    }
    Eigen::VectorXd log_lik(design.num_classes);
    for (int c = 0; c < design.num_classes; ++c) {
      log_lik[c] = -0.5 * (z - design.centers[static_cast<std::size_t>(c)]).squaredNorm();
    }
    const Eigen::VectorXd scaled = (log_lik.array() - log_lik.maxCoeff()).exp();
    const double target_density = design.domain_proportions.front().dot(scaled);
    const double source_density =
        design.domain_proportions[static_cast<std::size_t>(source_id)].dot(scaled);
    return target_density / source_density;
  };
}

std::vector<DomainDataset> gen_classification_latent(int num_sources, int num_classes,
                                                     double separation, int per_domain,
                                                     std::uint64_t seed) {
  const LatentClassDesign design =
      sample_latent_class_design(num_sources, num_classes, separation, false, seed);
  std::vector<DomainDataset> datasets;
  datasets.reserve(static_cast<std::size_t>(num_sources + 1));
  for (int domain = 0; domain <= num_sources; ++domain) {
    datasets.push_back(sample_latent_class_domain(design, domain, per_domain, true,
                                                  derive_seed(seed, static_cast<std::uint64_t>(domain + 1))));
  }
  return datasets;
}

}  // namespace mscp
