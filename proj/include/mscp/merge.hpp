#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mscp/wcp.hpp"

namespace mscp {

/// A rule for combining K per-source conformal p-values into one that is
/// valid (up to the rule's constant) under arbitrary dependence.
struct MergeRule {
  enum class Kind { GammaVote, BonferroniMin, TwiceMean };

  Kind kind = Kind::BonferroniMin;
  double gamma = 0.0;

  /// Vote rule with weight gamma in [0, 1); merging p-values additionally
  /// requires gamma > 0. gamma = 1/2 is the majority vote; gamma = (K-1)/K
  /// reproduces the Bonferroni min rule.
  static MergeRule gamma_vote(double gamma);
  static MergeRule bonferroni_min();
  static MergeRule twice_mean();
};

/// Intersection of votes: keep a point when strictly more than gamma * K of
/// the per-source sets contain it. All sets must be the same shape, label
/// sets over one class count or real-valued sets. When `alpha` is supplied,
/// every set must carry the level tag 1 - (1 - gamma) * alpha, the level the
/// vote construction requires per-source sets to be built at.
PredictionSet merged_set_vote(const std::vector<PredictionSet>& sets, double gamma,
                              std::optional<double> alpha = std::nullopt);

/// Merged p-value. GammaVote yields (alpha / (K * gamma)) * #{p_k > (1 -
/// gamma) * alpha}; BonferroniMin yields min(1, K * min p); TwiceMean yields
/// min(1, 2 * mean p). Each is capped at 1 and keeps the decision "merged >
/// alpha" valid at level alpha.
double merge_p_values(const MergeRule& rule, const std::vector<double>& p_values,
                      double alpha);

/// Regression inversion on a caller-provided candidate grid: keep candidates
/// whose merged p-value exceeds alpha and return runs of kept neighbors as
/// closed intervals. `pvalues_at` maps a candidate response to the K
/// per-source p-values. Candidates must be finite and strictly increasing.
PredictionSet merged_set_from_pvalues(
    const MergeRule& rule, const std::function<std::vector<double>(double)>& pvalues_at,
    double alpha, const std::vector<double>& candidates);

/// Classification inversion: keep labels whose merged p-value exceeds alpha.
PredictionSet merged_set_from_pvalues(
    const MergeRule& rule, const std::function<std::vector<double>(int)>& pvalues_at_label,
    double alpha, int num_classes);

}  // namespace mscp
