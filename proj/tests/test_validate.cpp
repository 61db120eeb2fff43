#include "doctest.h"
#include "mscp/validate.hpp"

using namespace mscp;

TEST_CASE("every invariant suite passes") {
  const auto summary = run_validate();
  CHECK(summary.all_passed());
  REQUIRE(summary.suites.size() == 8);
  for (const auto& suite : summary.suites) {
    INFO(suite.name);
    CHECK(suite.checks > 0);
    CHECK(suite.failures == 0);
  }
}

TEST_CASE("suites are deterministic under their seed") {
  const auto a = duality_suite(100, 42);
  const auto b = duality_suite(100, 42);
  CHECK(a.checks == b.checks);
  CHECK(a.failures == 0);
  CHECK(b.failures == 0);
}
