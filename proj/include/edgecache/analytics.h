#ifndef EDGECACHE_ANALYTICS_H_
#define EDGECACHE_ANALYTICS_H_

#include <cstddef>
#include <vector>

#include "edgecache/demand.h"
#include "edgecache/policy.h"

namespace edgecache {

// Long-run (hit ratio, cache occupancy) pair of one item.
struct HitOccupancy {
  double hit = 0.0;
  double occupancy = 0.0;
};

// Below this broadcast rate the overhearing terms are replaced by their
// lambda -> 0 limits.
inline constexpr double kMinOverhearRate = 1e-9;

// Closed-form hit ratio and occupancy of a deterministic TTL policy under
// Poisson(lambda) broadcasts. Three regimes, by the order of tau, omega, s:
//   tau <= omega <= s : overheard copies may arrive during the OFF period,
//   tau <= s <= omega : overhearing starts inside the ON period,
//   s <= tau <= omega : the caching timer outlives the OFF period.
// In the first two regimes the item also sits in the cache for tau after
// each request, which adds tau / E[X] to the occupancy.
HitOccupancy evaluate_co(const DemandProfile& profile, double lambda, const PolicyParams& params);
double hit_ratio_co(const DemandProfile& profile, double lambda, const PolicyParams& params);
double occupancy_co(const DemandProfile& profile, double lambda, const PolicyParams& params);

// Probability-weighted mixture of the deterministic components.
HitOccupancy evaluate_rco(const DemandProfile& profile, double lambda, const RandomizedParams& params);
double hit_ratio_rco(const DemandProfile& profile, double lambda, const RandomizedParams& params);
double occupancy_rco(const DemandProfile& profile, double lambda, const RandomizedParams& params);

// Any TTL ItemPolicy variant (throws ModelError for LRU/LFU).
HitOccupancy evaluate_policy(const DemandProfile& profile, double lambda, const ItemPolicy& policy);

// Caching-only pi^c(tau) and overhearing-only pi^o(omega) contributions,
// derived per component rather than from the three-regime formula.
HitOccupancy caching_only_part(const DemandProfile& profile, double tau);
HitOccupancy overhearing_only_part(const DemandProfile& profile, double lambda, double omega);

struct SeparatedParts {
  HitOccupancy caching;
  HitOccupancy overhearing;
};
// Test hook: the two components whose sum must reproduce evaluate_co.
SeparatedParts separability_check(const DemandProfile& profile, double lambda,
                                  const PolicyParams& params);

// Hit-ratio ceiling for a cache of size b: every item can be overheard the
// instant its OFF period ends. K is the number of leading items that fit.
struct UpperBound {
  double h_upper = 0.0;
  std::size_t k = 0;
};
UpperBound upper_bound(const Catalog& catalog, double b);

// Per-user popular items for heterogeneous event-driven overhearing.
struct PopularSets {
  std::vector<std::size_t> k;                    // K^(m)
  std::vector<std::vector<std::size_t>> order;   // items of user m by descending beta
  std::vector<std::vector<std::size_t>> popular; // D^(m): first K^(m) entries of order[m]
  std::vector<std::vector<std::size_t>> users_of_item;  // C_i

  bool is_popular(std::size_t user, std::size_t item) const;
};
PopularSets popular_sets(const Population& population, double b);

// max_{i <= K+1} 2 sqrt((beta_i s_i + 1) / M).
double homogeneous_gap_bound(const Catalog& catalog, double b, std::size_t caches);
// 1/b + max over items with nonempty C_i of 2 sqrt(beta_max) / sqrt(sum_{m in C_i} 1/E[X_i^(m)]).
double heterogeneous_gap_bound(const Population& population, double b);

}  // namespace edgecache

#endif  // EDGECACHE_ANALYTICS_H_
