#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "doctest.h"
#include "mscp/ratio.hpp"
#include "mscp/rng.hpp"

using namespace mscp;

namespace {

Eigen::VectorXd scalar(double v) {
  Eigen::VectorXd z(1);
  z << v;
  return z;
}

Eigen::MatrixXd gaussian_rows(int n, double mean, double sd, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(n, 1);
  for (int i = 0; i < n; ++i) m(i, 0) = mean + sd * rng.gaussian();
  return m;
}

}  // namespace

TEST_CASE("oracle ratio of identical laws is one") {
  const OracleGaussianRatio model{scalar(0.7), 2.0, scalar(0.7), 2.0};
  for (double z : {-3.0, 0.0, 0.7, 5.0}) {
    CHECK(oracle_gaussian_ratio(model, scalar(z)) == 1.0);
  }
}

TEST_CASE("oracle ratio of shifted gaussians") {
  // source N(6, 9), target N(0, 9): log ratio at z is ((z-6)^2 - z^2) / 18
  const OracleGaussianRatio model{scalar(6.0), 9.0, scalar(0.0), 9.0};
  CHECK(oracle_gaussian_ratio(model, scalar(0.0)) ==
        doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  CHECK(oracle_gaussian_ratio(model, scalar(3.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(oracle_gaussian_ratio(model, scalar(6.0)) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("oracle ratio checks dimensions") {
  const OracleGaussianRatio model{scalar(0.0), 1.0, scalar(0.0), 1.0};
  Eigen::VectorXd z2(2);
  z2 << 0.0, 0.0;
  CHECK_THROWS_AS(oracle_gaussian_ratio(model, z2), std::invalid_argument);
}

TEST_CASE("untrained classifier falls back to the prior") {
  const auto model = fit_logistic_ratio(gaussian_rows(10, 0.0, 1.0, 1),
                                        gaussian_rows(5, 0.0, 1.0, 2), 0, 0.1);
  CHECK(model.prior_correction == 2.0);
  CHECK(model.weights.isZero());
  CHECK(eval_ratio(RatioModel(model), scalar(0.3)) == 2.0);
}

TEST_CASE("indifferent classifier gives ratio one") {
  LogisticRatioModel model;
  model.weights = Eigen::VectorXd::Zero(1);
  CHECK(eval_ratio(RatioModel(model), scalar(0.0)) == 1.0);

  model.weights = scalar(1000.0);
  CHECK(eval_ratio(RatioModel(model), scalar(10.0)) == model.clip_max);
  CHECK(eval_ratio(RatioModel(model), scalar(-10.0)) == model.clip_min);
}

TEST_CASE("self-ratio fit lands near one") {
  const auto source = gaussian_rows(2000, 0.0, 1.0, 11);
  const auto target = gaussian_rows(2000, 0.0, 1.0, 12);
  const auto model = fit_logistic_ratio(source, target, 500, 0.1);
  const double at_zero = eval_ratio(RatioModel(model), scalar(0.0));
  CHECK(at_zero >= 0.8);
  CHECK(at_zero <= 1.25);
}

TEST_CASE("separated classes saturate at the clip bounds") {
  const auto source = gaussian_rows(100, -20.0, 0.5, 21);
  const auto target = gaussian_rows(100, 20.0, 0.5, 22);
  const auto model = fit_logistic_ratio(source, target, 500, 0.1);
  const double deep_target = eval_ratio(RatioModel(model), scalar(25.0));
  const double deep_source = eval_ratio(RatioModel(model), scalar(-25.0));
  CHECK(deep_target == model.clip_max);
  CHECK(deep_source == model.clip_min);
  CHECK(std::isfinite(deep_target));
}

TEST_CASE("fitting never increases the training loss") {
  const auto source = gaussian_rows(60, -0.5, 1.0, 31);
  const auto target = gaussian_rows(40, 0.5, 1.0, 32);
  const auto model = fit_logistic_ratio(source, target, 200, 0.1);

  Eigen::MatrixXd X(100, 1);
  X << source, target;
  Eigen::VectorXd labels(100);
  labels.setZero();
  labels.tail(40).setOnes();

  const double initial = logistic_loss(X, labels, Eigen::VectorXd::Zero(1), 0.0, 1e-4);
  const double final_loss = logistic_loss(X, labels, model.weights, model.bias, 1e-4);
  CHECK(final_loss <= initial + 1e-12);
}

TEST_CASE("fit rejects empty classes and dimension mismatches") {
  const auto rows = gaussian_rows(5, 0.0, 1.0, 41);
  CHECK_THROWS_AS(fit_logistic_ratio(Eigen::MatrixXd(0, 1), rows, 10, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_logistic_ratio(rows, Eigen::MatrixXd(0, 1), 10, 0.1),
                  std::invalid_argument);
  Eigen::MatrixXd wide(5, 2);
  wide.setZero();
  CHECK_THROWS_AS(fit_logistic_ratio(rows, wide, 10, 0.1), std::invalid_argument);
}

TEST_CASE("target subsample draws without replacement") {
  const auto target = gaussian_rows(40, 0.0, 1.0, 51);

  const auto full = balanced_target_subsample(target, 40, 7);
  std::vector<double> got(40);
  std::vector<double> want(40);
  for (int i = 0; i < 40; ++i) {
    got[i] = full(i, 0);
    want[i] = target(i, 0);
  }
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  CHECK(got == want);

  const auto a = balanced_target_subsample(target, 15, 9);
  const auto b = balanced_target_subsample(target, 15, 9);
  CHECK(a.isApprox(b));
  const auto c = balanced_target_subsample(target, 15, 10);
  CHECK_FALSE(a.isApprox(c));

  CHECK_THROWS_AS(balanced_target_subsample(target, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(balanced_target_subsample(target, 41, 1), std::invalid_argument);
}

TEST_CASE("make_ratio_fn applies the feature map first") {
  // affine map z = 2x; oracle compares N(0,1) laws shifted apart in z-space
  const OracleGaussianRatio model{scalar(2.0), 1.0, scalar(0.0), 1.0};
  Eigen::MatrixXd a(1, 1);
  a << 2.0;
  const auto fn = make_ratio_fn(RatioModel(model), FeatureMap::affine(a, scalar(0.0)));
  const double expected = oracle_gaussian_ratio(model, scalar(2.0));
  CHECK(fn(scalar(1.0)) == doctest::Approx(expected));
}
