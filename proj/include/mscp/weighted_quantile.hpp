#pragma once

#include <vector>

namespace mscp {

/// Tolerance for validating that a discrete distribution's masses sum to 1.
inline constexpr double kMassTolerance = 1e-9;

/// Slack used when comparing cumulative mass against a quantile level,
/// absorbing the rounding error of masses like 1/(n+1) that are not exactly
/// representable. Smaller than any mass gap that occurs in practice.
inline constexpr double kCumulativeSlack = 1e-9;

struct ScoreAtom {
  double score;
  double mass;
};

/// Discrete distribution over finite scores plus an explicit point mass at
/// +infinity. Atoms are sorted and duplicates merged at construction;
/// masses must be nonnegative and total 1 within kMassTolerance.
class WeightedScoreDistribution {
 public:
  WeightedScoreDistribution(std::vector<ScoreAtom> atoms, double tail_mass);

  const std::vector<ScoreAtom>& atoms() const { return atoms_; }
  double tail_mass() const { return tail_mass_; }

  /// Smallest score whose cumulative mass reaches `level`, or +infinity if
  /// only the tail mass does. Cumulative mass is compared with
  /// kCumulativeSlack so a level exactly on an atom boundary selects that
  /// atom. Requires level in (0, 1).
  double quantile(double level) const;

 private:
  std::vector<ScoreAtom> atoms_;
  std::vector<double> cumulative_;
  double tail_mass_;
};

/// Calibration weights and the test-point weight, normalized by their joint
/// total. `calibration[i]` is the mass on the i-th score and `test` the mass
/// on +infinity. Requires nonnegative finite ratios with a positive total.
struct NormalizedWeights {
  std::vector<double> calibration;
  double test;
};

NormalizedWeights normalize_weights(const std::vector<double>& calibration_ratios,
                                    double test_ratio);

double weighted_quantile(const WeightedScoreDistribution& dist, double level);

}  // namespace mscp
