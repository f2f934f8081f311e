#ifndef EDGECACHE_SIMULATOR_H_
#define EDGECACHE_SIMULATOR_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "edgecache/cache_state.h"
#include "edgecache/curve.h"
#include "edgecache/demand.h"
#include "edgecache/policy.h"

namespace edgecache {

struct SimConfig {
  Population population;
  // Cache serving each user; empty means user m is served by cache m.
  std::vector<std::size_t> cache_of_user;
  // policies[cache][item].
  std::vector<std::vector<ItemPolicy>> policies;
  OverhearingMode mode = OverhearingMode::kTimeDriven;
  std::vector<double> lambdas;  // time-driven broadcast rates, one per item
  double horizon = 1.0;
  std::uint64_t seed = 1;
  StartMode start = StartMode::kStationary;
  // Fraction of the horizon excluded from metrics; negative selects the
  // default (0 for stationary start, 0.1 for cold start).
  double warmup = -1.0;
  CapacityMode capacity = CapacityMode::kAverage;
  double cache_size = 0.0;
  bool baselines_overhear = false;
  double broadcast_delay = 0.0;  // event-driven only

  std::size_t num_caches() const;
  double warmup_fraction() const;
};

// Throws ModelError when the configuration is inconsistent.
void validate(const SimConfig& config);

struct ItemCounters {
  std::uint64_t requests = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t overheard_stores = 0;
  std::uint64_t broadcasts = 0;  // broadcasts triggered by this cache's misses
  double occupancy_time = 0.0;
};

struct SimMetrics {
  std::size_t caches = 0;
  std::size_t items = 0;
  OverhearingMode mode = OverhearingMode::kTimeDriven;
  double measured_from = 0.0;
  double measured_to = 0.0;
  std::vector<ItemCounters> counters;  // [cache * items + item]
  // Per-item broadcasts on the channel and the gaps between consecutive ones.
  std::vector<std::uint64_t> item_broadcasts;
  std::vector<double> broadcast_gap_sum;
  std::vector<std::uint64_t> broadcast_gaps;

  const ItemCounters& at(std::size_t cache, std::size_t item) const {
    return counters[cache * items + item];
  }
  double measured_time() const { return measured_to - measured_from; }
  // Totals over caches.
  ItemCounters item_total(std::size_t item) const;
  double overall_hit_ratio() const;  // 0 when nothing was requested
  // Hit ratio of one item pooled over caches; nullopt without requests.
  std::optional<double> item_hit_ratio(std::size_t item) const;
  // Occupancy of one item averaged over caches.
  double item_occupancy(std::size_t item) const;
  double cache_item_occupancy(std::size_t cache, std::size_t item) const;
};

SimMetrics run(const SimConfig& config);

// Mean inter-broadcast time of each item; nullopt when fewer than two
// broadcasts were seen or no other cache could overhear them.
std::vector<std::optional<double>> interoverhear_stats(const SimMetrics& metrics);

struct Estimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::size_t samples = 0;
  // Standard error needs at least two samples.
  bool has_stderr() const { return samples >= 2; }
};

Estimate summarize(const std::vector<double>& values);

struct ReplicationResult {
  std::vector<SimMetrics> runs;
  Estimate overall_hit_ratio;
  std::vector<Estimate> item_hit_ratio;   // over replications with requests
  std::vector<Estimate> item_occupancy;
};

// Seed of replication k, derived from the configured root seed.
std::uint64_t replication_seed(std::uint64_t root, std::size_t k);

// n independent runs (seeds from replication_seed) on the worker pool.
ReplicationResult replicate(const SimConfig& config, std::size_t n_reps);

}  // namespace edgecache

#endif  // EDGECACHE_SIMULATOR_H_
