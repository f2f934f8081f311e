#ifndef EDGECACHE_CACHE_STATE_H_
#define EDGECACHE_CACHE_STATE_H_

#include <cstddef>
#include <cstdint>
#include <set>
#include <tuple>
#include <vector>

#include "edgecache/policy.h"
#include "edgecache/rng.h"

namespace edgecache {

enum class CapacityMode {
  kAverage,  // occupancy budget enforced only on average, by the optimizer
  kHard,     // at most floor(b) items cached at any instant
};

struct CacheOptions {
  CapacityMode capacity = CapacityMode::kAverage;
  // Cache size; required for hard capacity and for LRU/LFU caches.
  double size = 0.0;
  // Let LRU/LFU admit overheard copies (off by default).
  bool baselines_overhear = false;
  // Occupancy is integrated from this time on.
  double metrics_start = 0.0;
};

// Per-item control state of one edge cache. TTL items follow the
// caching/deaf timer semantics; LRU and LFU caches keep their own
// replacement structures. Timers are owned by the caller: on_request reports
// when a caching timer must be armed and on_timer rejects stale generations.
class CacheState {
 public:
  // `policies` holds one policy per item. LRU/LFU must be used for all
  // items of a cache or for none. `seed` drives per-request randomization.
  CacheState(std::vector<ItemPolicy> policies, std::uint64_t seed, CacheOptions options);

  struct RequestOutcome {
    bool hit = false;
    bool arm_timer = false;
    double deadline = 0.0;
    std::uint32_t generation = 0;
  };

  // Serves a request at time t: reports whether the item was cached at t-,
  // then renews the item's timers (sampling a component for randomized
  // policies) or updates the LRU/LFU structures.
  RequestOutcome on_request(std::size_t item, double t);

  // Caching-timer expiry. Returns true when the item was evicted; stale
  // generations are ignored.
  bool on_timer(std::size_t item, double t, std::uint32_t generation);

  // A broadcast of `item` was heard at t. Returns true when the copy is
  // stored: the item is not cached, its deaf timer has expired and (in hard
  // mode) there is room.
  bool on_overhear(std::size_t item, double t);

  // Places the item in the state it would have at t = 0 if its last request
  // had happened at -age (age = +inf: never requested, stays deaf). With
  // overhear_rate > 0 the copy is treated as overheard during (-age + omega, 0)
  // with the Poisson probability 1 - exp(-rate (age - omega)). For LRU/LFU,
  // items must be initialized from the oldest to the most recent.
  RequestOutcome initialize(std::size_t item, double age, double overhear_rate);

  // Time-average occupancy per item over [metrics_start, t].
  std::vector<double> audit_occupancy(double t) const;
  // Cached time of `item` in [metrics_start, t].
  double occupancy_time(std::size_t item, double t) const;

  bool cached(std::size_t item) const { return items_[item].cached; }
  std::size_t cached_count() const { return cached_count_; }
  std::size_t num_items() const { return items_.size(); }

 private:
  enum class Kind { kTtl, kLru, kLfu };

  struct ItemState {
    bool cached = false;
    double cached_since = 0.0;
    double caching_deadline = 0.0;
    double deaf_deadline = 0.0;
    std::uint32_t generation = 0;
    double occupancy = 0.0;
    std::uint32_t policy = 0;
  };

  struct Compiled {
    std::vector<double> cumulative;
    std::vector<PolicyParams> components;
  };

  PolicyParams sample(std::size_t item);
  void load(std::size_t item, double t);
  void evict(std::size_t item, double t);
  bool make_room(double t);
  std::size_t capacity_items() const;

  void lru_touch(std::size_t item);
  void lru_unlink(std::size_t item);
  RequestOutcome lfu_request(std::size_t item, double t);

  Kind kind_ = Kind::kTtl;
  CacheOptions options_;
  std::vector<ItemState> items_;
  std::vector<Compiled> compiled_;
  std::vector<Rng> rngs_;
  std::size_t cached_count_ = 0;

  // LRU: doubly linked list over item indices, most recent at head_.
  static constexpr std::size_t kNil = static_cast<std::size_t>(-1);
  std::vector<std::size_t> prev_, next_;
  std::size_t head_ = kNil, tail_ = kNil;

  // LFU: global request counts and the cached items ordered by (count, last use).
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> last_use_;
  std::uint64_t tick_ = 0;
  std::set<std::tuple<std::uint64_t, std::uint64_t, std::size_t>> lfu_order_;
};

}  // namespace edgecache

#endif  // EDGECACHE_CACHE_STATE_H_
