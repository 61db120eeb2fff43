#include "mscp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "mscp/datagen.hpp"
#include "mscp/merge.hpp"
#include "mscp/models.hpp"
#include "mscp/pool.hpp"
#include "mscp/ratio.hpp"
#include "mscp/rng.hpp"
#include "mscp/wcp.hpp"

namespace mscp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Seed tags within one replication stream.
constexpr std::uint64_t kTagDesign = 0;
constexpr std::uint64_t kTagTest = 1;
constexpr std::uint64_t kTagTrain = 2;
constexpr std::uint64_t kTagUnlabeled = 3;
constexpr std::uint64_t kTagDomainBase = 10;   // + 2 * source index (draw, split)
constexpr std::uint64_t kTagSubsampleBase = 100;  // + source index

struct RepOutcome {
  bool covered = false;
  bool finite = false;
  double size = 0.0;  // interval length or label count
  double seconds = 0.0;
};

/// Run body(0..count-1) on a worker pool, stopping at the first exception
/// and rethrowing it after the join. Outcomes land in preallocated
/// per-index slots, so scheduling order never affects results.
void parallel_for(int count, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) break;
        try {
          body(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  return (n % 2 == 1) ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::string format_num(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

class MethodTimer {
 public:
  explicit MethodTimer(double& sink)
      : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~MethodTimer() {
    const auto stop = std::chrono::steady_clock::now();
    sink_ = std::chrono::duration<double>(stop - start_).count();
  }

 private:
  double& sink_;
  std::chrono::steady_clock::time_point start_;
};

/// [x, x_i * x_j for i <= j]; a linear classifier on these features can
/// represent any Gaussian log-density ratio exactly.
Eigen::VectorXd quadratic_expand(const Eigen::VectorXd& x) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd out(d + d * (d + 1) / 2);
  out.head(d) = x;
  int pos = d;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) out[pos++] = x[i] * x[j];
  }
  return out;
}

Eigen::MatrixXd quadratic_expand_rows(const Eigen::MatrixXd& X) {
  const int d = static_cast<int>(X.cols());
  Eigen::MatrixXd out(X.rows(), d + d * (d + 1) / 2);
  for (int r = 0; r < X.rows(); ++r) {
    out.row(r) = quadratic_expand(X.row(r).transpose()).transpose();
  }
  return out;
}

constexpr int kRatioEpochs = 500;
constexpr double kRatioLearningRate = 0.1;

/// Classifier-based target-over-source ratio on quadratic features. The
/// target pool is subsampled to the source size so the classes are
/// balanced, matching the prior correction of 1.
RatioFn fit_classifier_ratio(const std::vector<LabeledSample>& source_train,
                             const Eigen::MatrixXd& target_features, std::uint64_t seed) {
  const int keep = std::min(static_cast<int>(source_train.size()),
                            static_cast<int>(target_features.rows()));
  const Eigen::MatrixXd target = balanced_target_subsample(target_features, keep, seed);
  const LogisticRatioModel fitted =
      fit_logistic_ratio(quadratic_expand_rows(feature_matrix(source_train)),
                         quadratic_expand_rows(target), kRatioEpochs, kRatioLearningRate);
  const RatioModel model = fitted;
  return [model](const FeatureVector& x) { return eval_ratio(model, quadratic_expand(x)); };
}

MetricsRow aggregate(const ExperimentConfig& config, const std::string& method_name,
                     const std::string& grid_key, const std::vector<RepOutcome>& outcomes) {
  MetricsRow row;
  row.task = task_name(config.task);
  row.method = method_name;
  row.grid_key = grid_key;
  row.alpha = config.alpha;
  row.replications = static_cast<int>(outcomes.size());

  int covered = 0;
  int finite = 0;
  int covered_and_finite = 0;
  double seconds = 0.0;
  std::vector<double> finite_sizes;
  double size_sum = 0.0;
  for (const RepOutcome& out : outcomes) {
    covered += out.covered ? 1 : 0;
    finite += out.finite ? 1 : 0;
    covered_and_finite += (out.covered && out.finite) ? 1 : 0;
    if (out.finite) finite_sizes.push_back(out.size);
    size_sum += out.size;
    seconds += out.seconds;
  }
  const double r = static_cast<double>(outcomes.size());
  row.mcp = covered / r;
  row.pfi = finite / r;
  if (config.task == Task::Classification) {
    row.medl_or_size = size_sum / r;
  } else {
    row.medl_or_size = finite_sizes.empty() ? kInf : median(std::move(finite_sizes));
  }
  row.runtime_seconds = seconds;
  row.conditional_coverage =
      finite > 0 ? static_cast<double>(covered_and_finite) / finite
                 : std::numeric_limits<double>::quiet_NaN();
  return row;
}

std::vector<double> unit_ratios(std::size_t n) { return std::vector<double>(n, 1.0); }

/// Per-source calibration state shared by every multi-source method.
struct SourceCalibration {
  std::vector<CalibrationScores> per_source;
  std::vector<double> pooled_scores;
  std::vector<FeatureVector> pooled_points;
  std::vector<int> sizes;
};

SourceCalibration build_calibration(const std::vector<DomainDataset>& cal_sets,
                                    const std::vector<RatioFn>& ratios,
                                    const std::function<double(const LabeledSample&)>& score) {
  SourceCalibration cal;
  for (std::size_t k = 0; k < cal_sets.size(); ++k) {
    std::vector<double> scores;
    std::vector<double> weights;
    scores.reserve(cal_sets[k].samples.size());
    weights.reserve(cal_sets[k].samples.size());
    for (const LabeledSample& sample : cal_sets[k].samples) {
      const double s = score(sample);
      scores.push_back(s);
      weights.push_back(ratios[k](sample.x));
      cal.pooled_scores.push_back(s);
      cal.pooled_points.push_back(sample.x);
    }
    cal.per_source.emplace_back(std::move(scores), std::move(weights));
    cal.sizes.push_back(cal_sets[k].size());
  }
  return cal;
}

/// p-value of the never-rejected tail (test score beyond every calibration
/// score) for one source.
double tail_p_value(const CalibrationScores& cal, double test_ratio) {
  double total = test_ratio;
  for (const double w : cal.ratios) total += w;
  return test_ratio / total;
}

MergeRule make_rule(const MethodSpec& method, int num_sources) {
  switch (method.pvalue_rule) {
    case MergeRule::Kind::GammaVote:
      return MergeRule::gamma_vote(method.resolve_gamma(num_sources));
    case MergeRule::Kind::BonferroniMin:
      return MergeRule::bonferroni_min();
    case MergeRule::Kind::TwiceMean:
      return MergeRule::twice_mean();
  }
  throw std::logic_error("make_rule: unknown rule");
}

/// Exact inversion of the merged p-value for interval scores: every rule is
/// monotone in |y - prediction|, so the merged set is an interval whose
/// radius sits on a calibration score. The tail decision handles the
/// infinite case before any candidate is scored.
PredictionSet merged_pvalue_interval(const MethodSpec& method, const SourceCalibration& cal,
                                     const std::vector<double>& test_ratios,
                                     double prediction, double alpha) {
  const int num_sources = static_cast<int>(cal.per_source.size());
  const MergeRule rule = make_rule(method, num_sources);

  std::vector<double> tails(cal.per_source.size());
  for (std::size_t k = 0; k < cal.per_source.size(); ++k) {
    tails[k] = tail_p_value(cal.per_source[k], test_ratios[k]);
  }
  if (merge_p_values(rule, tails, alpha) > alpha) {
    return wcp_interval_regression(prediction, kInf);
  }

  std::vector<double> candidates;
  candidates.reserve(2 * cal.pooled_scores.size());
  for (const double s : cal.pooled_scores) {
    candidates.push_back(prediction - s);
    candidates.push_back(prediction + s);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const auto pvalues_at = [&](double y) {
    const double s = std::abs(y - prediction);
    std::vector<double> ps(cal.per_source.size());
    for (std::size_t k = 0; k < cal.per_source.size(); ++k) {
      ps[k] = weighted_p_value(cal.per_source[k], test_ratios[k], s);
    }
    return ps;
  };
  return merged_set_from_pvalues(rule, pvalues_at, alpha, candidates);
}

RepOutcome observe_real(const PredictionSet& set, double y) {
  RepOutcome out;
  out.covered = set.contains(y);
  out.finite = set.is_finite();
  out.size = set.length();
  return out;
}

RepOutcome observe_labels(const PredictionSet& set, int y) {
  RepOutcome out;
  out.covered = set.contains_label(y);
  out.finite = true;
  out.size = static_cast<double>(set.members().size());
  return out;
}

}  // namespace

MetricsReport run_figure1(const ExperimentConfig& config) {
  config.validate();
  MetricsReport report;
  const int num_methods = static_cast<int>(config.methods.size());
  int grid_index = 0;
  for (const double mu : config.mu_grid) {
    for (const int n : config.calibration_sizes) {
      const std::uint64_t grid_seed =
          derive_seed(config.master_seed, static_cast<std::uint64_t>(grid_index++));
      const std::string grid_key = "mu=" + format_num(mu) + ";n=" + std::to_string(n);
      std::vector<std::vector<RepOutcome>> outcomes(
          static_cast<std::size_t>(num_methods),
          std::vector<RepOutcome>(static_cast<std::size_t>(config.replications)));

      parallel_for(config.replications, [&](int r) {
        const std::uint64_t rep_seed = derive_seed(grid_seed, static_cast<std::uint64_t>(r));
        ShiftedGaussianDesign design;
        design.source_mean = mu;

        const DomainDataset train = sample_shifted_domain(
            design, false, config.train_size, true, derive_seed(rep_seed, kTagTrain));
        const DomainDataset cal =
            sample_shifted_domain(design, false, n, true, derive_seed(rep_seed, kTagDomainBase));
        const DomainDataset test =
            sample_shifted_domain(design, true, 1, true, derive_seed(rep_seed, kTagTest));

        const KernelRidgeModel model = fit_kernel_ridge(train.samples);
        std::vector<double> scores;
        scores.reserve(cal.samples.size());
        for (const LabeledSample& sample : cal.samples) {
          scores.push_back(
              score_abs_residual(predict_kernel_ridge(model, sample.x), sample.y.value()));
        }
        const FeatureVector& x_test = test.samples.front().x;
        const double y_test = test.samples.front().y.value();
        const double prediction = predict_kernel_ridge(model, x_test);

        RatioFn ratio;
        if (config.ratio_mode == RatioMode::Oracle) {
          ratio = shifted_oracle_ratio(design);
        } else {
          const DomainDataset unlabeled =
              sample_shifted_domain(design, true, config.target_unlabeled_size, false,
                                    derive_seed(rep_seed, kTagUnlabeled));
          ratio = fit_classifier_ratio(train.samples, feature_matrix(unlabeled.samples),
                                       derive_seed(rep_seed, kTagSubsampleBase));
        }

        for (int m = 0; m < num_methods; ++m) {
          double seconds = 0.0;
          PredictionSet set = PredictionSet::interval(0.0, 0.0);
          {
            const MethodTimer timer(seconds);
            std::vector<double> weights;
            double test_ratio = 1.0;
            if (config.methods[static_cast<std::size_t>(m)].kind == MethodSpec::Kind::WCP) {
              weights.reserve(cal.samples.size());
              for (const LabeledSample& sample : cal.samples) weights.push_back(ratio(sample.x));
              test_ratio = ratio(x_test);
            } else {
              weights = unit_ratios(cal.samples.size());
            }
            const double threshold = wcp_threshold(CalibrationScores(scores, std::move(weights)),
                                                   test_ratio, config.alpha);
            set = wcp_interval_regression(prediction, threshold);
          }
          RepOutcome out = observe_real(set, y_test);
          out.seconds = seconds;
          outcomes[static_cast<std::size_t>(m)][static_cast<std::size_t>(r)] = out;
        }
      });

      for (int m = 0; m < num_methods; ++m) {
        report.rows.push_back(aggregate(config, config.methods[static_cast<std::size_t>(m)].name(),
                                        grid_key, outcomes[static_cast<std::size_t>(m)]));
      }
    }
  }
  return report;
}

namespace {

/// Shared multi-source replication body: builds every configured method's
/// set for one test point given per-source calibration sets, ratio
/// functions, a score, and an inverter. Used by the regression and
/// classification runners.
void run_multi_source_methods(const ExperimentConfig& config,
                              const SourceCalibration& cal,
                              const std::vector<RatioFn>& ratios,
                              const FeatureVector& x_test, double prediction,
                              const std::function<PredictionSet(double)>& invert_real,
                              const Eigen::VectorXd& probs_test, int label_test,
                              double y_test, int r,
                              std::vector<std::vector<RepOutcome>>& outcomes) {
  const int num_sources = static_cast<int>(cal.per_source.size());
  const bool classification = config.task == Task::Classification;

  std::vector<double> test_ratios(static_cast<std::size_t>(num_sources));
  for (int k = 0; k < num_sources; ++k) {
    test_ratios[static_cast<std::size_t>(k)] = ratios[static_cast<std::size_t>(k)](x_test);
  }

  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    const MethodSpec& method = config.methods[m];
    double seconds = 0.0;
    RepOutcome out;
    {
      const MethodTimer timer(seconds);
      PredictionSet set = PredictionSet::interval(0.0, 0.0);
      switch (method.kind) {
        case MethodSpec::Kind::CP: {
          const double threshold =
              wcp_threshold(CalibrationScores(cal.pooled_scores, unit_ratios(cal.pooled_scores.size())),
                            1.0, config.alpha);
          set = classification ? wcp_set_classification(probs_test, threshold)
                               : invert_real(threshold);
          break;
        }
        case MethodSpec::Kind::PooledWCP: {
          const RatioFn mixture =
              mixture_ratio_from_components(ratios, pooling_proportions(cal.sizes));
          std::vector<double> weights;
          weights.reserve(cal.pooled_points.size());
          for (const FeatureVector& x : cal.pooled_points) weights.push_back(mixture(x));
          const double threshold = wcp_threshold(
              CalibrationScores(cal.pooled_scores, std::move(weights)), mixture(x_test),
              config.alpha);
          set = classification ? wcp_set_classification(probs_test, threshold)
                               : invert_real(threshold);
          break;
        }
        case MethodSpec::Kind::MergedVote: {
          const double gamma = method.resolve_gamma(num_sources);
          const double source_alpha = (1.0 - gamma) * config.alpha;
          const double source_level = 1.0 - source_alpha;
          std::vector<PredictionSet> sets;
          sets.reserve(static_cast<std::size_t>(num_sources));
          for (int k = 0; k < num_sources; ++k) {
            const double threshold =
                wcp_threshold(cal.per_source[static_cast<std::size_t>(k)],
                              test_ratios[static_cast<std::size_t>(k)], source_alpha);
            const PredictionSet source_set =
                classification ? wcp_set_classification(probs_test, threshold)
                               : invert_real(threshold);
            sets.push_back(source_set.with_level(source_level));
          }
          set = merged_set_vote(sets, gamma, config.alpha);
          break;
        }
        case MethodSpec::Kind::MergedPvalue: {
          if (classification) {
            const MergeRule rule = make_rule(method, num_sources);
            const auto pvalues_at_label = [&](int c) {
              const double s = 1.0 - probs_test[c];
              std::vector<double> ps(static_cast<std::size_t>(num_sources));
              for (int k = 0; k < num_sources; ++k) {
                ps[static_cast<std::size_t>(k)] =
                    weighted_p_value(cal.per_source[static_cast<std::size_t>(k)],
                                     test_ratios[static_cast<std::size_t>(k)], s);
              }
              return ps;
            };
            set = merged_set_from_pvalues(rule, pvalues_at_label, config.alpha,
                                          static_cast<int>(probs_test.size()));
          } else {
            set = merged_pvalue_interval(method, cal, test_ratios, prediction, config.alpha);
          }
          break;
        }
        case MethodSpec::Kind::WCP:
          throw std::logic_error("run_multi_source_methods: WCP is single-source");
      }
      out = classification ? observe_labels(set, label_test) : observe_real(set, y_test);
    }
    out.seconds = seconds;
    outcomes[m][static_cast<std::size_t>(r)] = out;
  }
}

}  // namespace

MetricsReport run_regression(const ExperimentConfig& config) {
  config.validate();
  const int num_sources = config.num_sources;
  const std::vector<int> totals = config.explicit_source_sizes.empty()
                                      ? source_sizes(config.dimension, num_sources)
                                      : config.explicit_source_sizes;
  int total_size = 0;
  for (const int n : totals) total_size += n;

  const std::uint64_t grid_seed = derive_seed(config.master_seed, 0);
  const std::string grid_key = "sigma_h_sq=" + format_num(config.hetero_scale_sq) +
                               ";K=" + std::to_string(num_sources) +
                               ";d=" + std::to_string(config.dimension);
  std::vector<std::vector<RepOutcome>> outcomes(
      config.methods.size(),
      std::vector<RepOutcome>(static_cast<std::size_t>(config.replications)));

  parallel_for(config.replications, [&](int r) {
    const std::uint64_t rep_seed = derive_seed(grid_seed, static_cast<std::uint64_t>(r));
    const RegressionDesign design =
        sample_regression_design(config.dimension, num_sources, config.hetero_scale_sq,
                                 derive_seed(rep_seed, kTagDesign));

    std::vector<DomainDataset> train_sets;
    std::vector<DomainDataset> cal_sets;
    std::vector<LabeledSample> train_pool;
    for (int k = 0; k < num_sources; ++k) {
      const DomainDataset domain = sample_regression_domain(
          design, k + 1, totals[static_cast<std::size_t>(k)], true,
          derive_seed(rep_seed, kTagDomainBase + 2 * static_cast<std::uint64_t>(k)));
      auto [train_part, cal_part] = split_dataset(
          domain, 0.5, derive_seed(rep_seed, kTagDomainBase + 2 * static_cast<std::uint64_t>(k) + 1));
      train_pool.insert(train_pool.end(), train_part.samples.begin(), train_part.samples.end());
      train_sets.push_back(std::move(train_part));
      cal_sets.push_back(std::move(cal_part));
    }
    const DomainDataset test =
        sample_regression_domain(design, 0, 1, true, derive_seed(rep_seed, kTagTest));

    const KernelRidgeModel model = fit_kernel_ridge(train_pool);
    const FeatureVector& x_test = test.samples.front().x;
    const double y_test = test.samples.front().y.value();
    const double prediction = predict_kernel_ridge(model, x_test);

    std::vector<RatioFn> ratios(static_cast<std::size_t>(num_sources));
    if (config.ratio_mode == RatioMode::Oracle) {
      for (int k = 0; k < num_sources; ++k) {
        ratios[static_cast<std::size_t>(k)] = regression_oracle_ratio(design, k + 1);
      }
    } else {
      const DomainDataset unlabeled = sample_regression_domain(
          design, 0, total_size / 2, false, derive_seed(rep_seed, kTagUnlabeled));
      const Eigen::MatrixXd target_features = feature_matrix(unlabeled.samples);
      for (int k = 0; k < num_sources; ++k) {
        ratios[static_cast<std::size_t>(k)] = fit_classifier_ratio(
            train_sets[static_cast<std::size_t>(k)].samples, target_features,
            derive_seed(rep_seed, kTagSubsampleBase + static_cast<std::uint64_t>(k)));
      }
    }

    const SourceCalibration cal =
        build_calibration(cal_sets, ratios, [&](const LabeledSample& sample) {
          return score_abs_residual(predict_kernel_ridge(model, sample.x), sample.y.value());
        });
    const auto invert_real = [&](double threshold) {
      return wcp_interval_regression(prediction, threshold);
    };
    run_multi_source_methods(config, cal, ratios, x_test, prediction, invert_real,
                             Eigen::VectorXd(), 0, y_test, r, outcomes);
  });

  MetricsReport report;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    report.rows.push_back(aggregate(config, config.methods[m].name(), grid_key, outcomes[m]));
  }
  return report;
}

MetricsReport run_classification(const ExperimentConfig& config) {
  config.validate();
  const int num_sources = config.num_sources;
  const std::uint64_t grid_seed = derive_seed(config.master_seed, 0);
  const std::string grid_key = "K=" + std::to_string(num_sources) +
                               ";C=" + std::to_string(config.num_classes) +
                               ";separation=" + format_num(config.separation);
  std::vector<std::vector<RepOutcome>> outcomes(
      config.methods.size(),
      std::vector<RepOutcome>(static_cast<std::size_t>(config.replications)));

  parallel_for(config.replications, [&](int r) {
    const std::uint64_t rep_seed = derive_seed(grid_seed, static_cast<std::uint64_t>(r));
    const LatentClassDesign design = sample_latent_class_design(
        num_sources, config.num_classes, config.separation, config.identical_proportions,
        derive_seed(rep_seed, kTagDesign));

    std::vector<DomainDataset> train_sets;
    std::vector<DomainDataset> cal_sets;
    std::vector<LabeledSample> train_pool;
    for (int k = 0; k < num_sources; ++k) {
      const DomainDataset domain = sample_latent_class_domain(
          design, k + 1, config.per_domain, true,
          derive_seed(rep_seed, kTagDomainBase + 2 * static_cast<std::uint64_t>(k)));
      auto [train_part, cal_part] = split_dataset(
          domain, 0.5, derive_seed(rep_seed, kTagDomainBase + 2 * static_cast<std::uint64_t>(k) + 1));
      train_pool.insert(train_pool.end(), train_part.samples.begin(), train_part.samples.end());
      train_sets.push_back(std::move(train_part));
      cal_sets.push_back(std::move(cal_part));
    }
    const DomainDataset test =
        sample_latent_class_domain(design, 0, 1, true, derive_seed(rep_seed, kTagTest));

    // Randomly drawn class proportions occasionally leave a class out of the
    // pooled training half.  Coverage does not depend on the predictor being
    // informative, so such replications fall back to the uniform predictor
    // instead of aborting the whole run.
    std::vector<bool> class_seen(static_cast<std::size_t>(config.num_classes), false);
    for (const LabeledSample& sample : train_pool) {
      class_seen[static_cast<std::size_t>(sample.y.class_index())] = true;
    }
    const bool all_classes_present =
        std::all_of(class_seen.begin(), class_seen.end(), [](bool seen) { return seen; });
    const int dim = train_pool.front().x.size();
    const SoftmaxModel model =
        all_classes_present
            ? fit_softmax(train_pool, config.num_classes)
            : SoftmaxModel{Eigen::MatrixXd::Zero(config.num_classes, dim),
                           Eigen::VectorXd::Zero(config.num_classes)};
    const FeatureVector& x_test = test.samples.front().x;
    const int label_test = test.samples.front().y.class_index();
    const Eigen::VectorXd probs_test = predict_softmax(model, x_test);

    std::vector<RatioFn> ratios(static_cast<std::size_t>(num_sources));
    if (config.ratio_mode == RatioMode::Oracle) {
      for (int k = 0; k < num_sources; ++k) {
        ratios[static_cast<std::size_t>(k)] = latent_class_oracle_ratio(design, k + 1);
      }
    } else {
      const DomainDataset unlabeled = sample_latent_class_domain(
          design, 0, num_sources * config.per_domain / 2, false,
          derive_seed(rep_seed, kTagUnlabeled));
      const Eigen::MatrixXd target_features = feature_matrix(unlabeled.samples);
      for (int k = 0; k < num_sources; ++k) {
        ratios[static_cast<std::size_t>(k)] = fit_classifier_ratio(
            train_sets[static_cast<std::size_t>(k)].samples, target_features,
            derive_seed(rep_seed, kTagSubsampleBase + static_cast<std::uint64_t>(k)));
      }
    }

    const SourceCalibration cal =
        build_calibration(cal_sets, ratios, [&](const LabeledSample& sample) {
          return score_one_minus_prob(predict_softmax(model, sample.x),
                                      sample.y.class_index());
        });
    run_multi_source_methods(config, cal, ratios, x_test, 0.0, nullptr, probs_test,
                             label_test, 0.0, r, outcomes);
  });

  MetricsReport report;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    report.rows.push_back(aggregate(config, config.methods[m].name(), grid_key, outcomes[m]));
  }
  return report;
}

MetricsReport run_experiment(const ExperimentConfig& config) {
  switch (config.task) {
    case Task::Figure1: return run_figure1(config);
    case Task::Regression: return run_regression(config);
    case Task::Classification: return run_classification(config);
  }
  throw std::logic_error("run_experiment: unknown task");
}

}  // namespace mscp
