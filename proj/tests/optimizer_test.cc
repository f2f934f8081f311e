#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "edgecache/analytics.h"
#include "edgecache/optimizer.h"
#include "edgecache/rng.h"

namespace edgecache {
namespace {

Catalog random_catalog(Rng& rng, std::size_t n) {
  std::vector<DemandProfile> items;
  for (std::size_t i = 0; i < n; ++i) items.push_back(DemandProfile::make(0.1 + 3 * rng.uniform(), 0.2 + 3 * rng.uniform()));
  return Catalog(items);
}

double objective_of(const Allocation& a, std::span<const OccupancyCurve> curves, std::span<const double> p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) sum += p[i] * curves[i].hit(a.r_star[i]);
  return sum;
}

TEST(Allocate, BudgetCoveringCatalogHitsEverything) {
  Rng rng(1);
  const Catalog c = random_catalog(rng, 5);
  const std::vector<double> lambdas(5, 0.5);
  const Allocation a = solve_time_driven(c, lambdas, 5.0);
  EXPECT_NEAR(a.objective, 1.0, 1e-9);
  EXPECT_NEAR(solve_time_driven(c, lambdas, 7.0).objective, 1.0, 1e-9);
}

TEST(Allocate, CachingOnlyPicksMostPopularItems) {
  const Catalog c({DemandProfile::make(1, 3), DemandProfile::make(1, 2), DemandProfile::make(1, 1),
                   DemandProfile::make(1, 0.5)});
  const auto p = popularity(c);
  const Allocation a = solve_caching_only(c, 2.5);
  EXPECT_NEAR(a.objective, p[0] + p[1] + 0.5 * p[2], 1e-9);
  EXPECT_NEAR(a.r_star[3], 0.0, 1e-12);
}

TEST(Allocate, MatchesGridOracleOnRandomInstances) {
  Rng rng(2);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 1 + k % 6;
    const Catalog c = random_catalog(rng, n);
    std::vector<double> lambdas;
    for (std::size_t i = 0; i < n; ++i) lambdas.push_back(0.05 + 3 * rng.uniform());
    const auto curves = time_driven_curves(c, lambdas, PolicyFamily::kCachingAndOverhearing);
    const auto p = popularity(c);
    const double b = 0.05 + n * rng.uniform();
    const Allocation a = allocate(curves, p, b);
    EXPECT_TRUE(satisfies_budget(a, b));
    EXPECT_NEAR(a.objective, objective_of(a, curves, p), 1e-12);
    EXPECT_NEAR(a.objective, grid_oracle_objective(curves, p, b), 1e-3) << "instance " << k;
  }
}

TEST(Allocate, EventDrivenHasAtMostOneExceptionalItem) {
  Rng rng(3);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 2 + k % 5;
    const Catalog c = random_catalog(rng, n);
    std::vector<double> bps;
    for (std::size_t i = 0; i < n; ++i) bps.push_back(rng.uniform() / c[i].overhear_slope());
    const auto curves = event_driven_curves(c, bps, PolicyFamily::kCachingAndOverhearing);
    const auto p = popularity(c);
    const double b = 0.05 + n * rng.uniform();
    const Allocation a = allocate(curves, p, b);
    EXPECT_LE(count_exceptional(a, curves), 1u);
    EXPECT_TRUE(satisfies_budget(a, b));
  }
}

TEST(Allocate, ObjectiveNondecreasingInBudgetAndBelowUpperBound) {
  ZipfSpec z;
  z.n = 40;
  const Catalog c = make_zipf_catalog(z);
  std::vector<double> lambdas;
  for (std::size_t i = 0; i < c.size(); ++i) lambdas.push_back(c[i].beta);
  double prev = 0.0;
  for (double b = 1; b <= 40; b += 3) {
    const Allocation a = solve_time_driven(c, lambdas, b);
    EXPECT_GE(a.objective, prev - 1e-9);
    EXPECT_LE(a.objective, upper_bound(c, b).h_upper + 1e-9);
    prev = a.objective;
  }
}

TEST(Allocate, PoliciesRealizeTheirOccupancies) {
  Rng rng(4);
  const Catalog c = random_catalog(rng, 6);
  const std::vector<double> lambdas{0.3, 1, 2, 0.5, 0.8, 1.5};
  const Allocation a = solve_time_driven(c, lambdas, 2.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const HitOccupancy v = evaluate_policy(c[i], lambdas[i], a.policies[i]);
    EXPECT_NEAR(v.occupancy, a.r_star[i], 1e-6);
  }
}

TEST(Benchmarks, OverhearingOnlyNeverBeatsCombined) {
  Rng rng(5);
  const Catalog c = random_catalog(rng, 6);
  const std::vector<double> lambdas(6, 1.0);
  for (double b : {0.5, 1.0, 3.0, 6.0}) {
    const BenchmarkAllocations bench = solve_benchmarks(c, lambdas, b);
    const double best = solve_time_driven(c, lambdas, b).objective;
    EXPECT_LE(bench.overhearing_only.objective, best + 1e-9);
    EXPECT_LE(bench.caching_only.objective, best + 1e-9);
  }
}

TEST(EventDriven, EstimatesClippedToLinearCeiling) {
  ZipfSpec z;
  z.n = 20;
  const Catalog c = make_zipf_catalog(z);
  const auto est = estimate_occupancies(Population::homogeneous(c, 10), 2000.0, 7);
  ASSERT_EQ(est.size(), c.size());
  for (const auto& e : est) {
    EXPECT_GE(e.r_bar, 0.0);
    EXPECT_LE(e.r_bar, 1.0 / c[e.item].overhear_slope() + 1e-12);
  }
  const auto again = estimate_occupancies(Population::homogeneous(c, 10), 2000.0, 7);
  for (std::size_t i = 0; i < est.size(); ++i) EXPECT_EQ(est[i].r_bar, again[i].r_bar);
}

TEST(Heterogeneous, PopularItemsOverhearOthersNeverCache) {
  std::vector<DemandProfile> u0, u1;
  const std::vector<double> betas{4.0, 2.0, 1.0, 0.5};
  for (std::size_t i = 0; i < 4; ++i) {
    u0.push_back(DemandProfile::make(1.0 / betas[i], betas[i]));
    u1.push_back(DemandProfile::make(1.0 / betas[3 - i], betas[3 - i]));
  }
  const OverhearOnlyPlan plan = solve_heterogeneous(Population::heterogeneous({u0, u1}), 1.0);
  ASSERT_EQ(plan.policies.size(), 2u);
  EXPECT_EQ(plan.policies[0][0], overhear_only(u0[0].s));
  EXPECT_EQ(plan.policies[0][3], never_cache());
  EXPECT_EQ(plan.policies[1][3], overhear_only(u1[3].s));
}

}  // namespace
}  // namespace edgecache
