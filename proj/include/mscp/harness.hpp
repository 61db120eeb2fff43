#pragma once

#include <string>
#include <vector>

#include "mscp/config.hpp"

namespace mscp {

/// Aggregated metrics for one (method, grid point) cell. Marginal coverage
/// probability, proportion of finite sets, and median length (regression) or
/// mean set size (classification). `conditional_coverage` (coverage among
/// replications with a finite set; NaN when none are finite) is kept for
/// diagnostics and is not part of the CSV schema.
struct MetricsRow {
  std::string task;
  std::string method;
  std::string grid_key;
  double alpha = 0.0;
  int replications = 0;
  double mcp = 0.0;
  double pfi = 0.0;
  double medl_or_size = 0.0;
  double runtime_seconds = 0.0;
  double conditional_coverage = 0.0;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
};

MetricsReport run_figure1(const ExperimentConfig& config);
MetricsReport run_regression(const ExperimentConfig& config);
MetricsReport run_classification(const ExperimentConfig& config);

/// Dispatch on config.task.
MetricsReport run_experiment(const ExperimentConfig& config);

/// Columns: task,method,grid_key,alpha,replications,mcp,pfi,medl_or_size,
/// runtime_seconds. '.' decimal separator, LF line endings, shortest
/// round-trip float formatting, and the literal "inf" for an infinite
/// medl_or_size cell (PFI = 0).
void emit_csv(const MetricsReport& report, const std::string& path);

/// Self-contained SVG with one panel per metric (coverage, finite fraction,
/// length or size), one polyline per method, axes and a legend.
void emit_svg(const MetricsReport& report, const std::string& path);

/// Worker count for the replication loop: MSCP_THREADS when set (>= 1),
/// otherwise the hardware concurrency.
int worker_count();

}  // namespace mscp
