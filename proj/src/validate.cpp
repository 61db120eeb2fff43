#include "mscp/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "mscp/merge.hpp"
#include "mscp/models.hpp"
#include "mscp/pool.hpp"
#include "mscp/ratio.hpp"
#include "mscp/rng.hpp"
#include "mscp/wcp.hpp"
#include "mscp/weighted_quantile.hpp"

namespace mscp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void record(SuiteResult& suite, bool ok) {
  ++suite.checks;
  if (!ok) ++suite.failures;
}

/// Random weights with deliberate zeros; at least one entry positive.
std::vector<double> random_ratios(Rng& rng, int n) {
  std::vector<double> ratios(static_cast<std::size_t>(n));
  for (double& w : ratios) w = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 2.0);
  return ratios;
}

}  // namespace

bool ValidationSummary::all_passed() const {
  if (suites.empty()) return false;
  return std::all_of(suites.begin(), suites.end(),
                     [](const SuiteResult& s) { return s.passed(); });
}

SuiteResult duality_suite(int instances, std::uint64_t seed) {
  SuiteResult suite{"duality", 0, 0};
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    const int n = 1 + rng.uniform_int(20);
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (double& s : scores) s = 0.5 * rng.uniform_int(8);  // heavy ties
    std::vector<double> ratios = random_ratios(rng, n);
    double test_ratio = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 2.0);
    double total = test_ratio;
    for (const double w : ratios) total += w;
    if (total == 0.0) test_ratio = 1.0;

    const CalibrationScores cal(scores, ratios);
    const double alpha = rng.uniform(0.01, 0.6);
    const double threshold = wcp_threshold(cal, test_ratio, alpha);

    std::vector<double> probes = scores;
    for (const double s : scores) {
      probes.push_back(s - 0.25);
      probes.push_back(s + 0.1);
    }
    probes.push_back(*std::max_element(scores.begin(), scores.end()) + 1.0);
    for (const double s : probes) {
      const double p = weighted_p_value(cal, test_ratio, s);
      record(suite, (p > alpha) == (s <= threshold));
    }
  }
  return suite;
}

SuiteResult split_conformal_suite(std::uint64_t seed) {
  SuiteResult suite{"split_conformal", 0, 0};
  Rng rng(seed);
  const int alpha_percents[] = {5, 10, 20};
  for (int n = 1; n <= 50; ++n) {
    for (const int a : alpha_percents) {
      std::vector<double> sorted(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) sorted[static_cast<std::size_t>(i)] = i + rng.uniform(0.0, 0.5);
      std::vector<double> shuffled = sorted;
      const std::vector<int> perm = random_permutation(n, rng);
      for (int i = 0; i < n; ++i) {
        shuffled[static_cast<std::size_t>(i)] = sorted[static_cast<std::size_t>(perm[i])];
      }

      // ceil((1 - alpha)(n + 1)) in integer arithmetic; the float version
      // misrounds cases like alpha = 0.1, n = 9.
      const int k = ((100 - a) * (n + 1) + 99) / 100;
      const double expected = k <= n ? sorted[static_cast<std::size_t>(k - 1)] : kInf;

      const CalibrationScores cal(shuffled, std::vector<double>(shuffled.size(), 1.0));
      const double actual = wcp_threshold(cal, 1.0, a / 100.0);
      record(suite, actual == expected);
    }
  }
  return suite;
}

SuiteResult bonferroni_identity_suite(int instances, std::uint64_t seed) {
  SuiteResult suite{"bonferroni_identity", 0, 0};
  Rng rng(seed);
  const int source_counts[] = {2, 3, 5};
  for (int i = 0; i < instances; ++i) {
    const int num_sources = source_counts[rng.uniform_int(3)];
    const double alpha = rng.uniform(0.05, 0.5);
    const double gamma = (num_sources - 1.0) / num_sources;
    const double source_alpha = (1.0 - gamma) * alpha;
    const double prediction = rng.uniform(-5.0, 5.0);

    std::vector<PredictionSet> sets;
    double min_threshold = kInf;
    for (int k = 0; k < num_sources; ++k) {
      const int n = 5 + rng.uniform_int(26);
      std::vector<double> scores(static_cast<std::size_t>(n));
      for (double& s : scores) s = rng.uniform(0.0, 10.0);
      std::vector<double> ratios = random_ratios(rng, n);
      const double test_ratio = rng.uniform(0.0, 2.0);
      const double threshold =
          wcp_threshold(CalibrationScores(scores, ratios), test_ratio, source_alpha);
      min_threshold = std::min(min_threshold, threshold);
      sets.push_back(wcp_interval_regression(prediction, threshold)
                         .with_level(1.0 - source_alpha));
    }

    const PredictionSet merged = merged_set_vote(sets, gamma, alpha);
    const std::vector<Interval> parts = merged.intervals();
    record(suite, parts.size() == 1);
    if (parts.size() != 1) continue;
    if (std::isinf(min_threshold)) {
      record(suite, parts.front().lo == -kInf && parts.front().hi == kInf);
    } else {
      record(suite, std::abs(parts.front().lo - (prediction - min_threshold)) <= 1e-12 &&
                        std::abs(parts.front().hi - (prediction + min_threshold)) <= 1e-12);
    }
  }
  return suite;
}

SuiteResult kmin_equivalence_suite(int triples, std::uint64_t seed) {
  SuiteResult suite{"kmin_equivalence", 0, 0};
  Rng rng(seed);
  for (int i = 0; i < triples; ++i) {
    const int num_sources = 2 + rng.uniform_int(7);
    const double alpha = rng.uniform(0.01, 0.99);
    std::vector<double> p_values(static_cast<std::size_t>(num_sources));
    for (double& p : p_values) p = rng.uniform();

    const MergeRule rule = MergeRule::gamma_vote((num_sources - 1.0) / num_sources);
    const bool vote_keeps = merge_p_values(rule, p_values, alpha) > alpha;
    const double min_p = *std::min_element(p_values.begin(), p_values.end());
    const bool kmin_keeps = num_sources * min_p > alpha;
    record(suite, vote_keeps == kmin_keeps);
  }
  return suite;
}

SuiteResult quantile_oracle_suite(int instances, std::uint64_t seed) {
  SuiteResult suite{"quantile_oracle", 0, 0};
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    const int n = 1 + rng.uniform_int(8);
    std::vector<long> numerators(static_cast<std::size_t>(n));
    std::vector<double> scores(static_cast<std::size_t>(n));
    long tail_numerator = rng.uniform_int(10);
    long denominator = tail_numerator;
    for (int j = 0; j < n; ++j) {
      numerators[static_cast<std::size_t>(j)] = rng.uniform_int(10);
      denominator += numerators[static_cast<std::size_t>(j)];
      scores[static_cast<std::size_t>(j)] = rng.uniform_int(6);  // duplicates likely
    }
    if (denominator == 0) {
      numerators[0] = 1;
      denominator = 1;
    }
    const long level_percent = 1 + rng.uniform_int(99);

    // Exact oracle: smallest score whose cumulative numerator reaches the
    // level, with both sides kept in integers.
    std::vector<std::pair<double, long>> sorted;
    for (int j = 0; j < n; ++j) {
      sorted.emplace_back(scores[static_cast<std::size_t>(j)],
                          numerators[static_cast<std::size_t>(j)]);
    }
    std::sort(sorted.begin(), sorted.end());
    double expected = kInf;
    long cumulative = 0;
    for (const auto& [score, mass] : sorted) {
      cumulative += mass;
      if (100 * cumulative >= level_percent * denominator) {
        expected = score;
        break;
      }
    }

    std::vector<ScoreAtom> atoms;
    for (int j = 0; j < n; ++j) {
      atoms.push_back(ScoreAtom{scores[static_cast<std::size_t>(j)],
                                static_cast<double>(numerators[static_cast<std::size_t>(j)]) /
                                    static_cast<double>(denominator)});
    }
    const WeightedScoreDistribution dist(
        atoms, static_cast<double>(tail_numerator) / static_cast<double>(denominator));
    record(suite, dist.quantile(level_percent / 100.0) == expected);
  }
  return suite;
}

SuiteResult gradient_check_suite(std::uint64_t seed) {
  SuiteResult suite{"gradient_check", 0, 0};
  Rng rng(seed);
  const double step = 1e-5;
  const auto close = [](double numeric, double analytic) {
    return std::abs(numeric - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic));
  };

  const int rows = 12;
  const int dim = 3;
  for (int point = 0; point < 10; ++point) {
    Eigen::MatrixXd X(rows, dim);
    Eigen::VectorXd labels(rows);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < dim; ++c) X(r, c) = rng.gaussian();
      labels[r] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    }
    Eigen::VectorXd weights(dim);
    for (int c = 0; c < dim; ++c) weights[c] = rng.uniform(-1.0, 1.0);
    double bias = rng.uniform(-1.0, 1.0);

    const LogisticGradient grad = logistic_gradient(X, labels, weights, bias, 1e-4);
    for (int c = 0; c < dim; ++c) {
      Eigen::VectorXd hi = weights;
      Eigen::VectorXd lo = weights;
      hi[c] += step;
      lo[c] -= step;
      const double numeric = (logistic_loss(X, labels, hi, bias, 1e-4) -
                              logistic_loss(X, labels, lo, bias, 1e-4)) /
                             (2.0 * step);
      record(suite, close(numeric, grad.weights[c]));
    }
    const double numeric_bias = (logistic_loss(X, labels, weights, bias + step, 1e-4) -
                                 logistic_loss(X, labels, weights, bias - step, 1e-4)) /
                                (2.0 * step);
    record(suite, close(numeric_bias, grad.bias));
  }

  const int classes = 3;
  for (int point = 0; point < 10; ++point) {
    Eigen::MatrixXd X(rows, dim);
    std::vector<int> labels(rows);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < dim; ++c) X(r, c) = rng.gaussian();
      labels[static_cast<std::size_t>(r)] = rng.uniform_int(classes);
    }
    Eigen::MatrixXd weights(classes, dim);
    Eigen::VectorXd bias(classes);
    for (int c = 0; c < classes; ++c) {
      for (int d = 0; d < dim; ++d) weights(c, d) = rng.uniform(-1.0, 1.0);
      bias[c] = rng.uniform(-1.0, 1.0);
    }

    const SoftmaxGradient grad = softmax_gradient(X, labels, weights, bias);
    for (int c = 0; c < classes; ++c) {
      for (int d = 0; d < dim; ++d) {
        Eigen::MatrixXd hi = weights;
        Eigen::MatrixXd lo = weights;
        hi(c, d) += step;
        lo(c, d) -= step;
        const double numeric =
            (softmax_loss(X, labels, hi, bias) - softmax_loss(X, labels, lo, bias)) /
            (2.0 * step);
        record(suite, close(numeric, grad.weights(c, d)));
      }
      Eigen::VectorXd hi = bias;
      Eigen::VectorXd lo = bias;
      hi[c] += step;
      lo[c] -= step;
      const double numeric =
          (softmax_loss(X, labels, weights, hi) - softmax_loss(X, labels, weights, lo)) /
          (2.0 * step);
      record(suite, close(numeric, grad.bias[c]));
    }
  }
  return suite;
}

SuiteResult tv_diagnostic_suite() {
  SuiteResult suite{"tv_diagnostic", 0, 0};
  record(suite, tv_lower_bound(1) == 0.5);
  record(suite, tv_lower_bound(2) == 0.625);
  for (int n = 1; n < 64; ++n) {
    record(suite, tv_lower_bound(n + 1) > tv_lower_bound(n));
  }
  record(suite, tv_lower_bound(50) > 0.9);

  // Exact rational cross-check 1 - C(2n, n) / 4^n for n small enough that
  // both sides fit in 64-bit integers.
  for (int n = 1; n <= 20; ++n) {
    unsigned long long binomial = 1;
    for (int j = 1; j <= n; ++j) {
      binomial = binomial * static_cast<unsigned long long>(n + j) /
                 static_cast<unsigned long long>(j);
    }
    const double expected =
        1.0 - static_cast<double>(binomial) / std::pow(4.0, n);
    record(suite, std::abs(tv_lower_bound(n) - expected) <= 1e-12);
  }
  return suite;
}

SuiteResult change_of_measure_suite(int draws, std::uint64_t seed) {
  SuiteResult suite{"change_of_measure", 0, 0};
  Rng rng(seed);

  struct Case {
    int dim;
    double mu_p;
    double var_p;
    double var_q;
  };
  const Case cases[] = {
      {1, 2.0, 9.0, 9.0},   // shifted equal-variance pair
      {1, 0.3, 0.75, 0.5},  // narrower target
      {2, 0.5, 1.0, 0.5},   // multi-dimensional source-target pair
  };

  for (const Case& c : cases) {
    OracleGaussianRatio model;
    model.mu_p = Eigen::VectorXd::Constant(c.dim, c.mu_p);
    model.var_p = c.var_p;
    model.mu_q = Eigen::VectorXd::Zero(c.dim);
    model.var_q = c.var_q;

    double sum = 0.0;
    double sum_sq = 0.0;
    const double sd_p = std::sqrt(c.var_p);
    for (int i = 0; i < draws; ++i) {
      const Eigen::VectorXd z = model.mu_p + sd_p * rng.gaussian_vector(c.dim);
      const double w = oracle_gaussian_ratio(model, z);
      sum += w;
      sum_sq += w * w;
    }
    const double mean = sum / draws;
    const double variance = std::max(0.0, sum_sq / draws - mean * mean);
    const double standard_error = std::sqrt(variance / draws);
    record(suite, std::abs(mean - 1.0) <= 3.0 * standard_error);
  }
  return suite;
}

ValidationSummary run_validate() {
  ValidationSummary summary;
  summary.suites.push_back(duality_suite(1000, 20240801));
  summary.suites.push_back(split_conformal_suite(20240802));
  summary.suites.push_back(bonferroni_identity_suite(200, 20240803));
  summary.suites.push_back(kmin_equivalence_suite(100000, 20240804));
  summary.suites.push_back(quantile_oracle_suite(500, 20240805));
  summary.suites.push_back(gradient_check_suite(20240806));
  summary.suites.push_back(tv_diagnostic_suite());
  summary.suites.push_back(change_of_measure_suite(10000, 20240807));
  return summary;
}

}  // namespace mscp
