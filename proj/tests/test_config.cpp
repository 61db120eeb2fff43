#include <string>

#include "doctest.h"
#include "mscp/config.hpp"

using namespace mscp;

namespace {

const char* kFigure1Json = R"({
  "task": "figure1",
  "alpha": 0.1,
  "replications": 50,
  "master_seed": 7,
  "ratio_mode": "oracle",
  "methods": ["CP", "WCP"],
  "mu_grid": [0, 2, 4, 6],
  "calibration_sizes": [10, 50],
  "train_size": 200
})";

const char* kRegressionJson = R"json({
  "task": "regression",
  "alpha": 0.1,
  "replications": 10,
  "master_seed": 3,
  "ratio_mode": "logistic",
  "methods": ["CP", "PooledWCP", "MergedVote(0.5)", "MergedVote((K-1)/K)",
              "MergedPvalue(bonferroni)", "MergedPvalue(twice_mean)",
              "MergedPvalue(gamma_vote,0.5)"],
  "dimension": 2,
  "num_sources": 5,
  "hetero_scale_sq": 4.0
})json";

}  // namespace

TEST_CASE("figure1 config round-trips") {
  const auto config = ExperimentConfig::from_json_text(kFigure1Json);
  CHECK(config.task == Task::Figure1);
  CHECK(config.alpha == 0.1);
  CHECK(config.replications == 50);
  CHECK(config.master_seed == 7);
  CHECK(config.ratio_mode == RatioMode::Oracle);
  REQUIRE(config.methods.size() == 2);
  CHECK(config.methods[0].name() == "CP");
  CHECK(config.methods[1].name() == "WCP");
  CHECK(config.mu_grid == std::vector<double>{0.0, 2.0, 4.0, 6.0});
  CHECK(config.calibration_sizes == std::vector<int>{10, 50});
  CHECK(config.train_size == 200);
  // defaults to the training size when not given
  CHECK(config.target_unlabeled_size == 200);
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("regression config parses every method string") {
  const auto config = ExperimentConfig::from_json_text(kRegressionJson);
  CHECK(config.task == Task::Regression);
  REQUIRE(config.methods.size() == 7);
  CHECK(config.methods[1].kind == MethodSpec::Kind::PooledWCP);
  CHECK(config.methods[2].kind == MethodSpec::Kind::MergedVote);
  CHECK(config.methods[2].gamma == 0.5);
  CHECK(config.methods[3].gamma_from_sources);
  CHECK(config.methods[3].resolve_gamma(5) == doctest::Approx(0.8));
  CHECK(config.methods[4].pvalue_rule == MergeRule::Kind::BonferroniMin);
  CHECK(config.methods[5].pvalue_rule == MergeRule::Kind::TwiceMean);
  CHECK(config.methods[6].pvalue_rule == MergeRule::Kind::GammaVote);
  CHECK(config.methods[6].gamma == 0.5);

  // canonical names survive a parse round trip
  for (const auto& method : config.methods) {
    CHECK(MethodSpec::parse(method.name()).name() == method.name());
  }
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({
    "task": "figure1", "alpha": 0.1, "replications": 1, "master_seed": 1,
    "ratio_mode": "oracle", "methods": ["WCP"], "mu_grid": [0],
    "calibration_sizes": [10], "train_size": 20, "typo_key": 1
  })"),
                  ConfigError);
  // keys from another task are unknown here
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({
    "task": "figure1", "alpha": 0.1, "replications": 1, "master_seed": 1,
    "ratio_mode": "oracle", "methods": ["WCP"], "mu_grid": [0],
    "calibration_sizes": [10], "train_size": 20, "dimension": 2
  })"),
                  ConfigError);
}

TEST_CASE("malformed documents are config errors") {
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("not json"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{}"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"task": "mystery"})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("method strings are strict") {
  CHECK_THROWS_AS(MethodSpec::parse("wcp"), ConfigError);
  CHECK_THROWS_AS(MethodSpec::parse("MergedVote"), ConfigError);
  CHECK_THROWS_AS(MethodSpec::parse("MergedVote(1.0)"), ConfigError);
  CHECK_THROWS_AS(MethodSpec::parse("MergedVote(-0.1)"), ConfigError);
  CHECK_THROWS_AS(MethodSpec::parse("MergedPvalue(median)"), ConfigError);
  CHECK_THROWS_AS(MethodSpec::parse("MergedPvalue(gamma_vote,0)"), ConfigError);
  CHECK_THROWS_AS(MethodSpec::parse("MergedPvalue(gamma_vote)"), ConfigError);
  CHECK(MethodSpec::parse("MergedVote((K-1)/K)").resolve_gamma(4) == doctest::Approx(0.75));
}

TEST_CASE("validate enforces per-task invariants") {
  auto config = ExperimentConfig::from_json_text(kFigure1Json);

  auto broken = config;
  broken.alpha = 1.5;
  CHECK_THROWS_AS(broken.validate(), ConfigError);

  broken = config;
  broken.replications = 0;
  CHECK_THROWS_AS(broken.validate(), ConfigError);

  broken = config;
  broken.methods.clear();
  CHECK_THROWS_AS(broken.validate(), ConfigError);

  // multi-source methods have no meaning on the single-source task
  broken = config;
  broken.methods.push_back(MethodSpec::parse("PooledWCP"));
  CHECK_THROWS_AS(broken.validate(), ConfigError);

  auto regression = ExperimentConfig::from_json_text(kRegressionJson);
  CHECK_NOTHROW(regression.validate());

  // single-source WCP has no meaning on the multi-source task
  auto bad_regression = regression;
  bad_regression.methods.push_back(MethodSpec::parse("WCP"));
  CHECK_THROWS_AS(bad_regression.validate(), ConfigError);

  // built-in sizes only exist for 5 or 10 sources
  bad_regression = regression;
  bad_regression.num_sources = 4;
  CHECK_THROWS_AS(bad_regression.validate(), ConfigError);
  bad_regression.explicit_source_sizes = {50, 50, 50, 50};
  CHECK_NOTHROW(bad_regression.validate());
  bad_regression.explicit_source_sizes = {50, 50, 50};
  CHECK_THROWS_AS(bad_regression.validate(), ConfigError);
}

TEST_CASE("task names match the CLI commands") {
  CHECK(task_name(Task::Figure1) == "figure1");
  CHECK(task_name(Task::Regression) == "regression");
  CHECK(task_name(Task::Classification) == "classification");
}
