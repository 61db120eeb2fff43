#include "mscp/merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mscp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLevelTolerance = 1e-9;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("merge: alpha must lie in (0, 1)");
  }
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("merge: gamma must lie in [0, 1)");
  }
}

void check_p_values(const std::vector<double>& p_values) {
  if (p_values.empty()) throw std::invalid_argument("merge: no p-values");
  for (const double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("merge: p-values must lie in [0, 1]");
    }
  }
}

/// One cell of the real line partitioned by the sets' finite endpoints:
/// either a single endpoint or the open gap between two neighbors.
struct Segment {
  double lo;
  double hi;
  bool is_point;
};

int segment_votes(const Segment& seg, const std::vector<std::vector<Interval>>& per_set) {
  int votes = 0;
  for (const auto& parts : per_set) {
    for (const Interval& part : parts) {
      const bool covers = seg.is_point ? (part.lo <= seg.lo && seg.lo <= part.hi)
                                       : (part.lo <= seg.lo && seg.hi <= part.hi);
      if (covers) {
        ++votes;
        break;
      }
    }
  }
  return votes;
}

PredictionSet merged_vote_real(const std::vector<PredictionSet>& sets, double gamma) {
  std::vector<std::vector<Interval>> per_set;
  per_set.reserve(sets.size());
  std::vector<double> endpoints;
  for (const PredictionSet& set : sets) {
    per_set.push_back(set.intervals());
    for (const Interval& part : per_set.back()) {
      if (std::isfinite(part.lo)) endpoints.push_back(part.lo);
      if (std::isfinite(part.hi)) endpoints.push_back(part.hi);
    }
  }
  std::sort(endpoints.begin(), endpoints.end());
  endpoints.erase(std::unique(endpoints.begin(), endpoints.end()), endpoints.end());

  // Partition the line into endpoint cells and the gaps between them. A vote
  // count is constant on each cell, and a kept gap always comes with kept
  // endpoints because the covering intervals are closed, so runs of kept
  // cells stitch into closed intervals.
  std::vector<Segment> segments;
  if (endpoints.empty()) {
    segments.push_back(Segment{-kInf, kInf, false});
  } else {
    segments.push_back(Segment{-kInf, endpoints.front(), false});
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
      segments.push_back(Segment{endpoints[i], endpoints[i], true});
      const double next = (i + 1 < endpoints.size()) ? endpoints[i + 1] : kInf;
      segments.push_back(Segment{endpoints[i], next, false});
    }
  }

  const double needed = gamma * static_cast<double>(sets.size());
  std::vector<Interval> merged;
  bool in_run = false;
  for (const Segment& seg : segments) {
    const bool keep = static_cast<double>(segment_votes(seg, per_set)) > needed;
    if (keep && !in_run) {
      merged.push_back(Interval{seg.lo, seg.hi});
      in_run = true;
    } else if (keep) {
      merged.back().hi = seg.hi;
    } else {
      in_run = false;
    }
  }
  return PredictionSet::interval_union(std::move(merged));
}

PredictionSet merged_vote_labels(const std::vector<PredictionSet>& sets, double gamma) {
  const int num_classes = sets.front().num_classes();
  for (const PredictionSet& set : sets) {
    if (set.num_classes() != num_classes) {
      throw std::invalid_argument("merged_set_vote: class counts differ");
    }
  }
  const double needed = gamma * static_cast<double>(sets.size());
  std::vector<int> members;
  for (int c = 0; c < num_classes; ++c) {
    int votes = 0;
    for (const PredictionSet& set : sets) votes += set.contains_label(c) ? 1 : 0;
    if (static_cast<double>(votes) > needed) members.push_back(c);
  }
  return PredictionSet::labels(std::move(members), num_classes);
}

}  // namespace

MergeRule MergeRule::gamma_vote(double gamma) {
  check_gamma(gamma);
  return MergeRule{Kind::GammaVote, gamma};
}

MergeRule MergeRule::bonferroni_min() { return MergeRule{Kind::BonferroniMin, 0.0}; }

MergeRule MergeRule::twice_mean() { return MergeRule{Kind::TwiceMean, 0.0}; }

PredictionSet merged_set_vote(const std::vector<PredictionSet>& sets, double gamma,
                              std::optional<double> alpha) {
  if (sets.empty()) throw std::invalid_argument("merged_set_vote: no sets");
  check_gamma(gamma);

  const bool labels = sets.front().is_labels();
  for (const PredictionSet& set : sets) {
    if (set.is_labels() != labels) {
      throw std::invalid_argument("merged_set_vote: cannot mix label and real-valued sets");
    }
  }
  if (alpha.has_value()) {
    check_alpha(*alpha);
    const double required_level = 1.0 - (1.0 - gamma) * (*alpha);
    for (const PredictionSet& set : sets) {
      if (!set.has_level() || std::abs(set.level() - required_level) > kLevelTolerance) {
        throw std::invalid_argument(
            "merged_set_vote: per-source sets must be built at level 1 - (1 - gamma) * alpha");
      }
    }
  } else {
    const bool any_tagged =
        std::any_of(sets.begin(), sets.end(), [](const PredictionSet& s) { return s.has_level(); });
    if (any_tagged) {
      for (const PredictionSet& set : sets) {
        if (!set.has_level() ||
            std::abs(set.level() - sets.front().level()) > kLevelTolerance) {
          throw std::invalid_argument("merged_set_vote: per-source levels differ");
        }
      }
    }
  }
  return labels ? merged_vote_labels(sets, gamma) : merged_vote_real(sets, gamma);
}

double merge_p_values(const MergeRule& rule, const std::vector<double>& p_values,
                      double alpha) {
  check_p_values(p_values);
  check_alpha(alpha);
  const double k = static_cast<double>(p_values.size());
  switch (rule.kind) {
    case MergeRule::Kind::GammaVote: {
      if (!(rule.gamma > 0.0)) {
        throw std::invalid_argument("merge_p_values: gamma vote requires gamma > 0");
      }
      const double cut = (1.0 - rule.gamma) * alpha;
      int votes = 0;
      for (const double p : p_values) votes += (p > cut) ? 1 : 0;
      // The vote/threshold ratio comes first so that the boundary case
      // (votes equal to k * gamma, merged value exactly alpha) stays exact;
      // dividing alpha by k * gamma and multiplying back can land one ulp
      // above alpha and flip the decision.
      return std::min(1.0, alpha * (static_cast<double>(votes) / (k * rule.gamma)));
    }
    case MergeRule::Kind::BonferroniMin:
      return std::min(1.0, k * *std::min_element(p_values.begin(), p_values.end()));
    case MergeRule::Kind::TwiceMean: {
      double sum = 0.0;
      for (const double p : p_values) sum += p;
      return std::min(1.0, 2.0 * sum / k);
    }
  }
  throw std::logic_error("merge_p_values: unknown rule");
}

PredictionSet merged_set_from_pvalues(
    const MergeRule& rule, const std::function<std::vector<double>(double)>& pvalues_at,
    double alpha, const std::vector<double>& candidates) {
  check_alpha(alpha);
  if (candidates.empty()) throw std::invalid_argument("merged_set_from_pvalues: empty grid");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!std::isfinite(candidates[i])) {
      throw std::invalid_argument("merged_set_from_pvalues: candidates must be finite");
    }
    if (i > 0 && candidates[i] <= candidates[i - 1]) {
      throw std::invalid_argument("merged_set_from_pvalues: candidates must increase");
    }
  }

  std::vector<Interval> kept;
  bool in_run = false;
  for (const double y : candidates) {
    if (merge_p_values(rule, pvalues_at(y), alpha) > alpha) {
      if (in_run) {
        kept.back().hi = y;
      } else {
        kept.push_back(Interval{y, y});
        in_run = true;
      }
    } else {
      in_run = false;
    }
  }
  return PredictionSet::interval_union(std::move(kept));
}

PredictionSet merged_set_from_pvalues(
    const MergeRule& rule, const std::function<std::vector<double>(int)>& pvalues_at_label,
    double alpha, int num_classes) {
  check_alpha(alpha);
  if (num_classes <= 0) {
    throw std::invalid_argument("merged_set_from_pvalues: num_classes must be > 0");
  }
  std::vector<int> members;
  for (int c = 0; c < num_classes; ++c) {
    if (merge_p_values(rule, pvalues_at_label(c), alpha) > alpha) members.push_back(c);
  }
  return PredictionSet::labels(std::move(members), num_classes);
}

}  // namespace mscp
