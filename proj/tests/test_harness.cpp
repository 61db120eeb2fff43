#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "mscp/config.hpp"
#include "mscp/harness.hpp"

using namespace mscp;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

MetricsReport tiny_report() {
  MetricsReport report;
  MetricsRow row;
  row.task = "regression";
  row.method = "PooledWCP";
  row.grid_key = "sigma_h_sq=4;K=5;d=2";
  row.alpha = 0.1;
  row.replications = 300;
  row.mcp = 0.90333333333333332;
  row.pfi = 1.0;
  row.medl_or_size = 10.841234567891234;
  row.runtime_seconds = 1.25;
  report.rows.push_back(row);

  row.method = "CP";
  row.pfi = 0.0;
  row.medl_or_size = std::numeric_limits<double>::infinity();
  report.rows.push_back(row);
  return report;
}

ExperimentConfig tiny_figure1() {
  return ExperimentConfig::from_json_text(R"({
    "task": "figure1", "alpha": 0.2, "replications": 4, "master_seed": 5,
    "ratio_mode": "oracle", "methods": ["CP", "WCP"], "mu_grid": [0, 2],
    "calibration_sizes": [8], "train_size": 16
  })");
}

}  // namespace

TEST_CASE("csv format is pinned") {
  const std::string path = "/tmp/mscp_test_report.csv";
  emit_csv(tiny_report(), path);
  const std::string text = slurp(path);

  CHECK(text.find('\r') == std::string::npos);
  const auto lines = split(text, '\n');
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "task,method,grid_key,alpha,replications,mcp,pfi,medl_or_size,runtime_seconds");

  const auto fields = split(lines[1], ',');
  REQUIRE(fields.size() == 9);
  CHECK(fields[0] == "regression");
  CHECK(fields[1] == "PooledWCP");
  CHECK(fields[2] == "sigma_h_sq=4;K=5;d=2");
  CHECK(fields[4] == "300");

  // shortest-round-trip formatting: parsing back recovers the exact value
  CHECK(std::stod(fields[3]) == 0.1);
  CHECK(std::stod(fields[5]) == 0.90333333333333332);
  CHECK(std::stod(fields[7]) == 10.841234567891234);
  CHECK(fields[3].find(',') == std::string::npos);

  const auto no_finite = split(lines[2], ',');
  CHECK(no_finite[6] == "0");
  CHECK(no_finite[7] == "inf");
}

TEST_CASE("csv rejects unwritable paths") {
  CHECK_THROWS_AS(emit_csv(tiny_report(), "/nonexistent_dir/x.csv"), std::runtime_error);
  CHECK_THROWS_AS(emit_svg(tiny_report(), "/nonexistent_dir/x.svg"), std::runtime_error);
}

TEST_CASE("svg output is a self-contained document") {
  const std::string path = "/tmp/mscp_test_report.svg";
  emit_svg(tiny_report(), path);
  const std::string text = slurp(path);

  CHECK(text.rfind("<?xml", 0) == 0);
  CHECK(text.find("<svg") != std::string::npos);
  CHECK(text.find("</svg>") != std::string::npos);
  CHECK(text.find("<polyline") != std::string::npos);
  CHECK(text.find("PooledWCP") != std::string::npos);
  CHECK(text.find("<image") == std::string::npos);
  CHECK(text.find("href") == std::string::npos);

  // crude well-formedness: angle brackets balance and never nest
  int depth = 0;
  for (char c : text) {
    if (c == '<') {
      REQUIRE(depth == 0);
      depth = 1;
    } else if (c == '>') {
      REQUIRE(depth == 1);
      depth = 0;
    }
  }
  CHECK(depth == 0);
}

TEST_CASE("experiments are deterministic given the seed") {
  const auto config = tiny_figure1();
  const auto a = run_experiment(config);
  const auto b = run_experiment(config);
  REQUIRE(a.rows.size() == b.rows.size());
  REQUIRE(a.rows.size() == 4);  // 2 grid cells x 2 methods

  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].task == b.rows[i].task);
    CHECK(a.rows[i].method == b.rows[i].method);
    CHECK(a.rows[i].grid_key == b.rows[i].grid_key);
    CHECK(a.rows[i].alpha == b.rows[i].alpha);
    CHECK(a.rows[i].replications == b.rows[i].replications);
    CHECK(a.rows[i].mcp == b.rows[i].mcp);
    CHECK(a.rows[i].pfi == b.rows[i].pfi);
    // runtime_seconds is wall-clock and intentionally exempt
    const bool same_length = a.rows[i].medl_or_size == b.rows[i].medl_or_size ||
                             (std::isinf(a.rows[i].medl_or_size) &&
                              std::isinf(b.rows[i].medl_or_size));
    CHECK(same_length);
  }

  auto reseeded = config;
  reseeded.master_seed = 6;
  const auto c = run_experiment(reseeded);
  bool any_difference = false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    any_difference = any_difference || a.rows[i].mcp != c.rows[i].mcp ||
                     a.rows[i].medl_or_size != c.rows[i].medl_or_size;
  }
  CHECK(any_difference);
}

TEST_CASE("metric rows stay in range") {
  const auto report = run_experiment(tiny_figure1());
  for (const auto& row : report.rows) {
    CHECK(row.mcp >= 0.0);
    CHECK(row.mcp <= 1.0);
    CHECK(row.pfi >= 0.0);
    CHECK(row.pfi <= 1.0);
    CHECK(row.replications == 4);
    CHECK(row.runtime_seconds >= 0.0);
    CHECK(row.alpha == 0.2);
  }
}

TEST_CASE("classification control without shift keeps the level") {
  auto config = ExperimentConfig::from_json_text(R"json({
    "task": "classification", "alpha": 0.1, "replications": 200, "master_seed": 31,
    "ratio_mode": "oracle",
    "methods": ["CP", "PooledWCP", "MergedVote(0.5)", "MergedPvalue(bonferroni)"],
    "num_sources": 3, "num_classes": 3, "separation": 3.0, "per_domain": 60,
    "identical_proportions": true
  })json");
  const auto report = run_experiment(config);
  const double bound = 0.9 - 3.0 * std::sqrt(0.1 * 0.9 / 200.0);
  for (const auto& row : report.rows) {
    INFO(row.method);
    CHECK(row.mcp >= bound);
  }
}

TEST_CASE("shifted classification: pooling covers, voting is wider") {
  auto config = ExperimentConfig::from_json_text(R"json({
    "task": "classification", "alpha": 0.1, "replications": 200, "master_seed": 32,
    "ratio_mode": "oracle", "methods": ["PooledWCP", "MergedVote(0.5)"],
    "num_sources": 3, "num_classes": 3, "separation": 3.0, "per_domain": 60
  })json");
  const auto report = run_experiment(config);
  REQUIRE(report.rows.size() == 2);
  const auto& pooled = report.rows[0];
  const auto& voted = report.rows[1];
  REQUIRE(pooled.method == "PooledWCP");
  REQUIRE(voted.method == "MergedVote(0.5)");
  CHECK(pooled.mcp >= 0.9 - 3.0 * std::sqrt(0.1 * 0.9 / 200.0));
  CHECK(voted.medl_or_size >= pooled.medl_or_size);
}

TEST_CASE("worker count obeys the environment override") {
  setenv("MSCP_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("MSCP_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  // malformed values fall back to the hardware default
  setenv("MSCP_THREADS", "0", 1);
  CHECK(worker_count() >= 1);
  setenv("MSCP_THREADS", "junk", 1);
  CHECK(worker_count() >= 1);
  unsetenv("MSCP_THREADS");
  CHECK(worker_count() >= 1);
}
