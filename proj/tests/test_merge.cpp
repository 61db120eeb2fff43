#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mscp/merge.hpp"
#include "mscp/rng.hpp"
#include "mscp/wcp.hpp"

using namespace mscp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PredictionSet tagged_interval(double lo, double hi, double level) {
  return PredictionSet::interval((lo + hi) / 2.0, (hi - lo) / 2.0).with_level(level);
}

}  // namespace

TEST_CASE("majority vote keeps the doubly covered stretch") {
  const double alpha = 0.1;
  const double gamma = 0.5;
  const double level = 1.0 - (1.0 - gamma) * alpha;
  const std::vector<PredictionSet> sets = {
      tagged_interval(0.0, 2.0, level),
      tagged_interval(1.0, 3.0, level),
      tagged_interval(10.0, 11.0, level),
  };
  const auto merged = merged_set_vote(sets, gamma, alpha);
  const auto parts = merged.intervals();
  REQUIRE(parts.size() == 1);
  CHECK(parts[0].lo == doctest::Approx(1.0));
  CHECK(parts[0].hi == doctest::Approx(2.0));
}

TEST_CASE("unanimous identical sets pass through") {
  for (double gamma : {0.0, 0.3, 0.5, 0.9}) {
    const auto s = PredictionSet::interval(1.0, 2.0);
    const auto merged = merged_set_vote({s, s}, gamma);
    CHECK(merged.contains(-1.0));
    CHECK(merged.contains(3.0));
    CHECK_FALSE(merged.contains(3.1));
    CHECK(merged.length() == doctest::Approx(4.0));
  }
}

TEST_CASE("gamma (K-1)/K is the intersection") {
  const std::vector<PredictionSet> sets = {
      PredictionSet::interval(0.0, 5.0), PredictionSet::interval(1.0, 5.0),
      PredictionSet::interval(2.0, 5.0), PredictionSet::interval(0.5, 4.0),
      PredictionSet::interval(1.5, 4.5)};
  const auto merged = merged_set_vote(sets, 4.0 / 5.0);
  // intersection of [-5,5],[-4,6],[-3,7],[-3.5,4.5],[-3,6] = [-3, 4.5]
  const auto parts = merged.intervals();
  REQUIRE(parts.size() == 1);
  CHECK(parts[0].lo == doctest::Approx(-3.0));
  CHECK(parts[0].hi == doctest::Approx(4.5));
}

TEST_CASE("strict vote can empty the merged set") {
  const std::vector<PredictionSet> sets = {PredictionSet::interval(0.0, 1.0),
                                           PredictionSet::interval(10.0, 1.0)};
  const auto merged = merged_set_vote(sets, 0.5);
  CHECK(merged.length() == 0.0);
  CHECK_FALSE(merged.contains(0.0));
  CHECK_FALSE(merged.contains(10.0));
}

TEST_CASE("vote handles infinite per-source intervals") {
  const std::vector<PredictionSet> sets = {PredictionSet::interval(0.0, kInf),
                                           PredictionSet::interval(0.0, kInf),
                                           PredictionSet::interval(5.0, 1.0)};
  const auto merged = merged_set_vote(sets, 0.5);
  CHECK(merged.contains(-1e15));
  CHECK(merged.contains(1e15));
  CHECK_FALSE(merged.is_finite());
}

TEST_CASE("vote over label sets") {
  const auto a = PredictionSet::labels({0, 1}, 3);
  const auto b = PredictionSet::labels({1, 2}, 3);
  const auto c = PredictionSet::labels({1}, 3);
  const auto merged = merged_set_vote({a, b, c}, 0.5);
  CHECK_FALSE(merged.contains_label(0));
  CHECK(merged.contains_label(1));
  CHECK_FALSE(merged.contains_label(2));
}

TEST_CASE("vote validates its inputs") {
  const auto interval = PredictionSet::interval(0.0, 1.0);
  const auto labels = PredictionSet::labels({0}, 2);
  CHECK_THROWS_AS(merged_set_vote({interval, labels}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(merged_set_vote({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(merged_set_vote({interval}, 1.0), std::invalid_argument);

  // when alpha is supplied the per-source level tag must match 1-(1-gamma)alpha
  CHECK_THROWS_AS(merged_set_vote({interval}, 0.5, 0.1), std::invalid_argument);
  const auto wrong = interval.with_level(0.9);
  CHECK_THROWS_AS(merged_set_vote({wrong}, 0.5, 0.1), std::invalid_argument);
  const auto right = interval.with_level(0.95);
  CHECK_NOTHROW(merged_set_vote({right}, 0.5, 0.1));
}

TEST_CASE("merged p-values follow the rule formulas") {
  CHECK(merge_p_values(MergeRule::bonferroni_min(), {0.01, 0.5, 0.9}, 0.1) ==
        doctest::Approx(0.03));
  CHECK(merge_p_values(MergeRule::twice_mean(), {0.5, 0.5}, 0.1) == 1.0);
  CHECK(merge_p_values(MergeRule::gamma_vote(0.5), {0.06, 0.06, 0.02, 0.02}, 0.1) ==
        doctest::Approx(0.1));
  CHECK_THROWS_AS(merge_p_values(MergeRule::gamma_vote(0.0), {0.5}, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(merge_p_values(MergeRule::bonferroni_min(), {}, 0.1),
                  std::invalid_argument);
}

TEST_CASE("label inversion keeps labels with large merged p") {
  const auto evaluator = [](int label) {
    return label == 0 ? std::vector<double>{0.3, 0.4} : std::vector<double>{0.01, 0.02};
  };
  const auto set =
      merged_set_from_pvalues(MergeRule::bonferroni_min(), evaluator, 0.1, 2);
  CHECK(set.contains_label(0));
  CHECK_FALSE(set.contains_label(1));
}

TEST_CASE("tiny alpha keeps every candidate") {
  const auto evaluator = [](double) { return std::vector<double>{0.02, 0.03}; };
  const auto set = merged_set_from_pvalues(MergeRule::twice_mean(), evaluator, 1e-9,
                                           {0.0, 1.0, 2.0});
  CHECK(set.contains(0.0));
  CHECK(set.contains(2.0));
}

TEST_CASE("grid inversion rejects bad candidate lists") {
  const auto evaluator = [](double) { return std::vector<double>{0.5}; };
  CHECK_THROWS_AS(
      merged_set_from_pvalues(MergeRule::bonferroni_min(), evaluator, 0.1, {}),
      std::invalid_argument);
  CHECK_THROWS_AS(merged_set_from_pvalues(MergeRule::bonferroni_min(), evaluator, 0.1,
                                          {1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("vote and p-value merging agree on label sets") {
  // per-source membership <=> per-source p > (1-gamma) alpha, so the two
  // constructions must match label for label
  Rng rng(909);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + rng.uniform_int(4);
    const int num_classes = 2 + rng.uniform_int(3);
    const double alpha = rng.uniform(0.05, 0.4);
    const double gamma = rng.uniform(0.1, 0.9);
    const double cut = (1.0 - gamma) * alpha;
    const double level = 1.0 - cut;

    std::vector<std::vector<double>> pvals(num_classes, std::vector<double>(k));
    for (auto& row : pvals) {
      for (double& p : row) p = rng.uniform() < 0.2 ? cut : rng.uniform(0.001, 1.0);
    }

    std::vector<PredictionSet> per_source;
    for (int s = 0; s < k; ++s) {
      std::vector<int> members;
      for (int c = 0; c < num_classes; ++c) {
        if (pvals[c][s] > cut) members.push_back(c);
      }
      per_source.push_back(PredictionSet::labels(members, num_classes).with_level(level));
    }
    const auto voted = merged_set_vote(per_source, gamma, alpha);
    const auto inverted = merged_set_from_pvalues(
        MergeRule::gamma_vote(gamma), [&](int c) { return pvals[c]; }, alpha,
        num_classes);
    for (int c = 0; c < num_classes; ++c) {
      CHECK(voted.contains_label(c) == inverted.contains_label(c));
    }
  }
}
