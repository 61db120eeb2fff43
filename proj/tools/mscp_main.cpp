#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "mscp/config.hpp"
#include "mscp/harness.hpp"
#include "mscp/validate.hpp"

namespace {

struct RunOptions {
  std::string config_path;
  std::string out_csv;
  std::string out_svg;
};

void add_run_options(CLI::App* sub, RunOptions& options) {
  sub->add_option("--config", options.config_path, "JSON experiment configuration")
      ->required();
  sub->add_option("--out-csv", options.out_csv, "metrics CSV output path")->required();
  sub->add_option("--out-svg", options.out_svg, "optional SVG plot output path");
}

int run_task(mscp::Task task, const RunOptions& options) {
  mscp::ExperimentConfig config;
  try {
    config = mscp::ExperimentConfig::from_file(options.config_path);
    if (config.task != task) {
      throw mscp::ConfigError("config: task '" + mscp::task_name(config.task) +
                              "' does not match the '" + mscp::task_name(task) +
                              "' command");
    }
  } catch (const mscp::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    const mscp::MetricsReport report = mscp::run_experiment(config);
    mscp::emit_csv(report, options.out_csv);
    std::printf("wrote %s\n", options.out_csv.c_str());
    if (!options.out_svg.empty()) {
      mscp::emit_svg(report, options.out_svg);
      std::printf("wrote %s\n", options.out_svg.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

int run_validate_command() {
  const mscp::ValidationSummary summary = mscp::run_validate();
  for (const mscp::SuiteResult& suite : summary.suites) {
    std::printf("%-20s %6d checks  %3d failures  %s\n", suite.name.c_str(), suite.checks,
                suite.failures, suite.passed() ? "PASS" : "FAIL");
  }
  return summary.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted conformal prediction under multi-source covariate shift"};
  app.require_subcommand(1);

  RunOptions figure1_options;
  RunOptions regression_options;
  RunOptions classification_options;
  CLI::App* figure1 =
      app.add_subcommand("figure1", "single-source coverage sweep over shift and sample size");
  add_run_options(figure1, figure1_options);
  CLI::App* regression =
      app.add_subcommand("regression", "multi-source regression method comparison");
  add_run_options(regression, regression_options);
  CLI::App* classification =
      app.add_subcommand("classification", "multi-source classification method comparison");
  add_run_options(classification, classification_options);
  CLI::App* validate = app.add_subcommand("validate", "run the library invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (figure1->parsed()) return run_task(mscp::Task::Figure1, figure1_options);
  if (regression->parsed()) return run_task(mscp::Task::Regression, regression_options);
  if (classification->parsed()) return run_task(mscp::Task::Classification, classification_options);
  if (validate->parsed()) return run_validate_command();
  return 2;
}
