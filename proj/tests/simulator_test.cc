#include <cmath>

#include <gtest/gtest.h>

#include "edgecache/analytics.h"
#include "edgecache/error.h"
#include "edgecache/simulator.h"

namespace edgecache {
namespace {

SimConfig single_cache(const DemandProfile& d, ItemPolicy policy, double lambda, double horizon) {
  SimConfig cfg;
  cfg.population = Population::homogeneous(Catalog({d}), 1);
  cfg.policies = {{policy}};
  cfg.lambdas = {lambda};
  cfg.horizon = horizon;
  return cfg;
}

SimConfig event_driven(std::size_t caches, std::vector<ItemPolicy> row, const Catalog& catalog, double horizon) {
  SimConfig cfg;
  cfg.population = Population::homogeneous(catalog, caches);
  cfg.policies.assign(caches, row);
  cfg.mode = OverhearingMode::kEventDriven;
  cfg.horizon = horizon;
  cfg.warmup = 0.1;
  return cfg;
}

const Catalog kThree({DemandProfile::make(1.0, 1.0), DemandProfile::make(2.0, 0.5), DemandProfile::make(0.5, 2.0)});

TEST(Simulator, SameSeedSameCounters) {
  SimConfig cfg = event_driven(5, {overhear_only(1.0), always_cache(), CoPolicy{PolicyParams{0.3, 0.9}}}, kThree, 500);
  const SimMetrics a = run(cfg), b = run(cfg);
  for (std::size_t k = 0; k < a.counters.size(); ++k) {
    EXPECT_EQ(a.counters[k].requests, b.counters[k].requests);
    EXPECT_EQ(a.counters[k].hits, b.counters[k].hits);
    EXPECT_EQ(a.counters[k].occupancy_time, b.counters[k].occupancy_time);
  }
  cfg.seed = 2;
  EXPECT_NE(run(cfg).counters[0].requests + run(cfg).counters[1].hits, a.counters[0].requests + a.counters[1].hits);
}

TEST(Simulator, ConservationAndCausality) {
  const SimMetrics m = run(event_driven(8, {overhear_only(1.0), overhear_only(2.0), never_cache()}, kThree, 2000));
  for (std::size_t i = 0; i < m.items; ++i) {
    const ItemCounters t = m.item_total(i);
    EXPECT_EQ(t.hits + t.misses, t.requests);
    EXPECT_EQ(m.item_broadcasts[i], t.misses);  // every miss broadcasts, nothing else does
    for (std::size_t c = 0; c < m.caches; ++c) {
      EXPECT_GE(m.at(c, i).occupancy_time, 0.0);
      EXPECT_LE(m.at(c, i).occupancy_time, m.measured_time() * (1 + 1e-12));
    }
  }
  EXPECT_EQ(m.item_total(2).hits, 0u);
}

TEST(Simulator, SingleCacheMatchesClosedForm) {
  const DemandProfile d = DemandProfile::make(1.0, 1.0);
  const PolicyParams p{0.4, 1.6};
  const SimConfig cfg = single_cache(d, CoPolicy{p}, 0.8, 5e3);
  const ReplicationResult r = replicate(cfg, 10);
  const HitOccupancy theory = evaluate_co(d, 0.8, p);
  EXPECT_NEAR(r.item_hit_ratio[0].mean, theory.hit, 4 * r.item_hit_ratio[0].stderr_mean + 1e-9);
  EXPECT_NEAR(r.item_occupancy[0].mean, theory.occupancy, 4 * r.item_occupancy[0].stderr_mean + 1e-9);
}

TEST(Simulator, ColdStartSupported) {
  SimConfig cfg = single_cache(DemandProfile::make(1.0, 1.0), always_cache(), 0.0, 1000);
  cfg.start = StartMode::kColdStart;
  const SimMetrics m = run(cfg);
  EXPECT_GT(m.overall_hit_ratio(), 0.99);
  EXPECT_NEAR(cfg.warmup_fraction(), 0.1, 1e-15);
}

TEST(Simulator, OverheardRatioNearLinearSlope) {
  // All caches overhear with omega = s: h / r = beta s + 1 per item.
  const Catalog c({DemandProfile::make(1.0, 1.0), DemandProfile::make(2.0, 0.5)});
  const SimMetrics m = run(event_driven(30, {overhear_only(1.0), overhear_only(2.0)}, c, 4000));
  for (std::size_t i = 0; i < 2; ++i) {
    const double ratio = *m.item_hit_ratio(i) / m.item_occupancy(i);
    EXPECT_NEAR(ratio, c[i].overhear_slope(), 0.1 * c[i].overhear_slope());
  }
}

TEST(Simulator, InterOverhearTimesUndefinedWithoutListeners) {
  const SimMetrics m = run(event_driven(1, {overhear_only(1.0), overhear_only(2.0), overhear_only(0.5)}, kThree, 100));
  for (const auto& v : interoverhear_stats(m)) EXPECT_FALSE(v.has_value());
}

TEST(Simulator, RejectsInconsistentConfigs) {
  SimConfig cfg = single_cache(DemandProfile::make(1.0, 1.0), always_cache(), 1.0, 100);
  cfg.lambdas = {};
  EXPECT_THROW(run(cfg), ModelError);
  cfg.lambdas = {1.0};
  cfg.horizon = -1;
  EXPECT_THROW(run(cfg), ModelError);
  cfg.horizon = 100;
  cfg.policies = {{always_cache(), always_cache()}};
  EXPECT_THROW(run(cfg), ModelError);
}

TEST(Replicate, IndependentSeedsAndSummaries) {
  EXPECT_NE(replication_seed(1, 0), replication_seed(1, 1));
  const ReplicationResult r = replicate(single_cache(DemandProfile::make(1, 1), overhear_only(0.5), 1.0, 200), 4);
  ASSERT_EQ(r.runs.size(), 4u);
  EXPECT_EQ(r.overall_hit_ratio.samples, 4u);
  EXPECT_GE(r.overall_hit_ratio.stderr_mean, 0.0);
  const Estimate one = summarize({0.5});
  EXPECT_FALSE(one.has_stderr());
  const Estimate e = summarize({1.0, 3.0});
  EXPECT_DOUBLE_EQ(e.mean, 2.0);
  EXPECT_DOUBLE_EQ(e.stderr_mean, 1.0);
}

TEST(Replicate, ThreadCountDoesNotChangeResults) {
  const SimConfig cfg = event_driven(4, {overhear_only(1.0), always_cache(), never_cache()}, kThree, 300);
  setenv("EDGECACHE_THREADS", "1", 1);
  const ReplicationResult a = replicate(cfg, 3);
  setenv("EDGECACHE_THREADS", "3", 1);
  const ReplicationResult b = replicate(cfg, 3);
  unsetenv("EDGECACHE_THREADS");
  EXPECT_EQ(a.overall_hit_ratio.mean, b.overall_hit_ratio.mean);
  EXPECT_EQ(a.item_occupancy[0].mean, b.item_occupancy[0].mean);
}

}  // namespace
}  // namespace edgecache
