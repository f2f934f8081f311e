#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "edgecache/demand.h"
#include "edgecache/error.h"
#include "edgecache/rng.h"

namespace edgecache {
namespace {

TEST(DemandProfile, RejectsBadParameters) {
  EXPECT_THROW(DemandProfile::make(1.0, 0.0), ModelError);
  EXPECT_THROW(DemandProfile::make(-1.0, 1.0), ModelError);
  EXPECT_THROW(DemandProfile::make(1.0, kInfinity), ModelError);
  EXPECT_NO_THROW(DemandProfile::make(0.0, 2.0));
}

TEST(DemandProfile, NonRecurrentItemHasZeroRate) {
  const DemandProfile d = DemandProfile::make(kInfinity, 1.0);
  EXPECT_FALSE(d.recurrent());
  EXPECT_EQ(d.request_rate(), 0.0);
}

TEST(Catalog, SortsByDecreasingBetaAndKeepsOriginalIndex) {
  const Catalog c({DemandProfile::make(1, 0.5), DemandProfile::make(1, 2.0), DemandProfile::make(1, 1.0)});
  EXPECT_DOUBLE_EQ(c[0].beta, 2.0);
  EXPECT_DOUBLE_EQ(c[2].beta, 0.5);
  EXPECT_EQ(c.original_index(0), 1u);
  EXPECT_EQ(c.original_index(2), 0u);
}

TEST(Popularity, SumsToOneAndFollowsRequestRates) {
  const std::vector<DemandProfile> items{DemandProfile::make(1, 1), DemandProfile::make(3, 1)};
  const auto p = popularity(items);
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);
  EXPECT_NEAR(p[0] / p[1], 2.0, 1e-12);  // E[X] = 2 vs 4
}

TEST(Zipf, NormalizingConstantOfLruExample) {
  EXPECT_NEAR(zipf_constant(1000, 1.4), 0.3392, 1e-4);
  ZipfSpec z;
  z.n = 10;
  const Catalog c = make_zipf_catalog(z);
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    sum += c[i].beta;
    EXPECT_NEAR(c[i].s * c[i].beta, 1.0, 1e-12);
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Rng, SameSeedSameStreamAndDerivedSeedsDiffer) {
  Rng a(7), b(7);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(derive_seed(1, {1, 2}), derive_seed(1, {2, 1}));
  EXPECT_NE(derive_seed(1, {1}), derive_seed(2, {1}));
}

TEST(Rng, UniformInUnitIntervalAndExponentialMean) {
  Rng r(3);
  double sum = 0.0;
  constexpr int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += r.exponential(4.0);
  }
  EXPECT_NEAR(sum / n, 0.25, 0.25 * 5 / std::sqrt(n));
}

TEST(Renewal, GapMeanIsOffPeriodPlusMeanWait) {
  const DemandProfile d = DemandProfile::make(1.5, 2.0);
  Rng r(11);
  double sum = 0.0, sq = 0.0;
  constexpr int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double g = next_request_gap(d, r);
    ASSERT_GE(g, d.s);
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(mean, d.mean_gap(), 4 * sd / std::sqrt(n));
}

TEST(Renewal, ColdStartPlacesRequestAtZero) {
  Rng r(5);
  const RenewalPhase ph = initial_phase(DemandProfile::make(2, 1), StartMode::kColdStart, r);
  EXPECT_EQ(ph.age, 0.0);
}

TEST(Renewal, StationaryStartResidualMatchesEquilibrium) {
  // Residual life of a stationary renewal process: E[X^2] / (2 E[X]).
  const DemandProfile d = DemandProfile::make(1.0, 1.0);
  const double ex = 2.0, ex2 = 1.0 + 2.0 * 1.0 + 2.0;  // (s + Y)^2 with Y ~ Exp(1)
  Rng r(9);
  double sum = 0.0;
  constexpr int n = 200000;
  for (int k = 0; k < n; ++k) sum += initial_phase(d, StartMode::kStationary, r).residual;
  EXPECT_NEAR(sum / n, ex2 / (2 * ex), 0.01);
}

TEST(RequestStream, SortedWithinHorizonAndReproducible) {
  const Population pop = Population::homogeneous(Catalog({DemandProfile::make(0.5, 1), DemandProfile::make(1, 2)}), 3);
  const RequestStream a = generate_stream(pop, 100.0, 42);
  const RequestStream b = generate_stream(pop, 100.0, 42);
  ASSERT_EQ(a.requests.size(), b.requests.size());
  for (std::size_t k = 0; k < a.requests.size(); ++k) {
    EXPECT_EQ(a.requests[k].time, b.requests[k].time);
    EXPECT_LE(a.requests[k].time, 100.0);
    if (k > 0) EXPECT_LE(a.requests[k - 1].time, a.requests[k].time);
  }
  // 3 users x (1/1.5 + 1/1.5) requests per unit time.
  EXPECT_NEAR(static_cast<double>(a.requests.size()), 100.0 * 3 * (2.0 / 1.5), 60.0);
}

TEST(Population, HeterogeneousRowsMustMatch) {
  EXPECT_THROW(Population::heterogeneous({{DemandProfile::make(1, 1)}, {}}), ModelError);
  const Population p = Population::heterogeneous({{DemandProfile::make(1, 1)}, {DemandProfile::make(2, 1)}});
  EXPECT_FALSE(p.is_homogeneous());
  const auto share = user_share(p);
  EXPECT_NEAR(share[0] + share[1], 1.0, 1e-15);
  EXPECT_GT(share[0], share[1]);
}

}  // namespace
}  // namespace edgecache
