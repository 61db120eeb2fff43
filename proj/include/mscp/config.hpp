#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mscp/merge.hpp"

namespace mscp {

/// Invalid or malformed experiment configuration; the CLI maps this to exit
/// code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Task { Figure1, Regression, Classification };

enum class RatioMode { Oracle, Logistic };

std::string task_name(Task task);

/// One prediction-set construction method. Parsed from the compact config
/// strings:
///   "CP", "WCP", "PooledWCP",
///   "MergedVote(0.5)", "MergedVote((K-1)/K)",
///   "MergedPvalue(bonferroni)", "MergedPvalue(twice_mean)",
///   "MergedPvalue(gamma_vote,0.5)".
struct MethodSpec {
  enum class Kind { CP, WCP, PooledWCP, MergedVote, MergedPvalue };

  Kind kind = Kind::CP;
  double gamma = 0.5;
  bool gamma_from_sources = false;  // gamma = (K-1)/K resolved at run time
  MergeRule::Kind pvalue_rule = MergeRule::Kind::BonferroniMin;

  static MethodSpec parse(const std::string& text);
  std::string name() const;
  double resolve_gamma(int num_sources) const;
};

struct ExperimentConfig {
  Task task = Task::Figure1;
  double alpha = 0.1;
  int replications = 1;
  std::uint64_t master_seed = 1;
  RatioMode ratio_mode = RatioMode::Oracle;
  std::vector<MethodSpec> methods;

  // figure1 grid
  std::vector<double> mu_grid;
  std::vector<int> calibration_sizes;
  int train_size = 200;
  int target_unlabeled_size = 200;

  // regression
  int dimension = 2;
  int num_sources = 5;
  double hetero_scale_sq = 0.0;
  std::vector<int> explicit_source_sizes;

  // classification
  int num_classes = 3;
  double separation = 3.0;
  int per_domain = 200;
  bool identical_proportions = false;

  /// Parse a JSON document; unknown keys are a hard error.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  /// Throws ConfigError on any invariant violation.
  void validate() const;
};

}  // namespace mscp
