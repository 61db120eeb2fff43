#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "mscp/rng.hpp"

using namespace mscp;

TEST_CASE("same seed gives the same stream") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived seeds give distinct streams") {
  Rng a(derive_seed(42, 0));
  Rng b(derive_seed(42, 1));
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += a.next_u64() == b.next_u64();
  CHECK(equal == 0);
  CHECK(derive_seed(42, 0) != derive_seed(43, 0));
}

TEST_CASE("uniform stays in range") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform(-1.0, 1.0);
    CHECK(v >= -1.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("uniform_int covers its range without bias") {
  Rng rng(11);
  std::vector<int> counts(8, 0);
  const int draws = 80000;
  for (int i = 0; i < draws; ++i) {
    const int k = rng.uniform_int(8);
    REQUIRE(k >= 0);
    REQUIRE(k < 8);
    ++counts[k];
  }
  // each bin ~10000, sd ~94; 5 sd band
  for (int c : counts) CHECK(std::abs(c - draws / 8) < 500);
  CHECK_THROWS_AS(rng.uniform_int(0), std::invalid_argument);
}

TEST_CASE("gaussian moments") {
  Rng rng(13);
  const int draws = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(draws)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / draws));
}

TEST_CASE("gaussian_vector has the requested dimension") {
  Rng rng(17);
  CHECK(rng.gaussian_vector(5).size() == 5);
  CHECK_THROWS_AS(rng.gaussian_vector(0), std::invalid_argument);
}

TEST_CASE("random_permutation is a permutation") {
  Rng rng(19);
  auto perm = random_permutation(50, rng);
  auto sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
  CHECK(random_permutation(0, rng).empty());
}
