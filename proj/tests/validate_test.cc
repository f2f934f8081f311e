#include <gtest/gtest.h>

#include "edgecache/validate.h"

namespace edgecache {
namespace {

TEST(Validate, QuickSuitePasses) {
  ValidateOptions o;
  o.quick = true;
  const ValidationReport r = run_validation(o);
  EXPECT_TRUE(r.passed()) << r.first_failure();
  EXPECT_EQ(r.first_failure(), "");
}

TEST(Validate, BrokenModelReportsRegionContinuity) {
  ValidateOptions o;
  o.quick = true;
  // Jump in the hit ratio once omega passes s.
  o.model = [](const DemandProfile& d, double lambda, const PolicyParams& p) {
    HitOccupancy v = evaluate_co(d, lambda, p);
    if (p.omega > d.s) v.hit *= 0.999;
    return v;
  };
  const ValidationReport r = run_validation(o);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.first_failure().rfind("region continuity", 0), 0u) << r.first_failure();
}

TEST(Validate, CasesCoverAllThreeOrderings) {
  const auto cases = random_closed_form_cases(30, 5);
  int seen[3] = {0, 0, 0};
  for (const auto& c : cases) {
    const double s = c.profile.s;
    ASSERT_LE(c.params.tau, c.params.omega);
    if (c.params.omega <= s) ++seen[0];
    else if (c.params.tau <= s) ++seen[1];
    else ++seen[2];
  }
  EXPECT_EQ(seen[0], 10);
  EXPECT_EQ(seen[1], 10);
  EXPECT_EQ(seen[2], 10);
}

TEST(Validate, SimulationAgreesWithClosedForm) {
  const auto cases = random_closed_form_cases(3, 9);
  for (const auto& c : cases) {
    const OracleComparison cmp = compare_with_simulation(c, 2e4, 10, 3, {});
    EXPECT_LT(std::abs(cmp.z_hit()), 4.0);
    EXPECT_LT(std::abs(cmp.z_occupancy()), 4.0);
  }
}

}  // namespace
}  // namespace edgecache
