#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mscp {

struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;

  bool passed() const { return failures == 0 && checks > 0; }
};

struct ValidationSummary {
  std::vector<SuiteResult> suites;
  bool all_passed() const;
};

/// Invariant suites shared by `mscp validate` and the acceptance tests.
/// Each is deterministic under its seed and returns check/failure counts.

/// p > alpha <=> score <= threshold over randomized instances with ties and
/// zero ratios.
SuiteResult duality_suite(int instances, std::uint64_t seed);

/// Uniform-ratio threshold equals the ceil((1-alpha)(n+1))-th order
/// statistic (or +infinity), for n <= 50 and alpha in {0.05, 0.1, 0.2},
/// with the order-statistic index computed in integer arithmetic.
SuiteResult split_conformal_suite(std::uint64_t seed);

/// Vote merging at gamma = (K-1)/K equals the exact interval intersection
/// of per-source sets built at level 1 - alpha/K.
SuiteResult bonferroni_identity_suite(int instances, std::uint64_t seed);

/// GammaVote merged p-value at gamma = (K-1)/K decides exactly like
/// K * min(p) > alpha.
SuiteResult kmin_equivalence_suite(int triples, std::uint64_t seed);

/// Weighted quantile agrees with an exact rational-arithmetic scan on small
/// distributions with rational masses.
SuiteResult quantile_oracle_suite(int instances, std::uint64_t seed);

/// Logistic and softmax gradients match central finite differences.
SuiteResult gradient_check_suite(std::uint64_t seed);

/// tv_lower_bound: exact small-n values, exact rational check for n <= 20,
/// strict growth through n = 64, and > 0.9 by n = 50.
SuiteResult tv_diagnostic_suite();

/// Oracle Gaussian ratios satisfy E_P[w(Z)] = 1 within 3 standard errors.
SuiteResult change_of_measure_suite(int draws, std::uint64_t seed);

/// All suites at their default sizes.
ValidationSummary run_validate();

}  // namespace mscp
