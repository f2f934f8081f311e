#include "edgecache/simulator.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edgecache/error.h"
#include "edgecache/parallel.h"

namespace edgecache {
namespace {

// Equal timestamps: timers, then broadcasts, then requests.
enum EventKind : std::uint64_t { kTimer = 0, kBroadcast = 1, kRequest = 2 };

struct Event {
  double time;
  std::uint64_t order;  // kind in the top bits, insertion counter below
  std::uint32_t a;
  std::uint32_t b;
  std::uint32_t generation;

  EventKind kind() const { return static_cast<EventKind>(order >> 62); }
};

// Calendar queue (bucketed by time, one "year" = buckets * width). Events
// live in a pooled singly linked list per bucket; pop scans the current
// bucket for the smallest (time, order) of the current bucket number. With
// about one pending event per bucket both operations are O(1) on average.
class EventQueue {
 public:
  EventQueue(std::size_t expected_pending, double event_rate) {
    std::size_t buckets = 16;
    while (buckets < expected_pending) buckets <<= 1;
    mask_ = buckets - 1;
    heads_.assign(buckets, kNone);
    width_ = event_rate > 0.0 ? 3.0 / event_rate : 1.0;
  }

  bool empty() const { return size_ == 0; }

  void push(const Event& e) {
    const std::uint64_t k = bucket_of(e.time);
    std::uint32_t slot;
    if (free_ != kNone) {
      slot = free_;
      free_ = pool_[slot].next;
    } else {
      slot = static_cast<std::uint32_t>(pool_.size());
      pool_.push_back({});
    }
    pool_[slot].event = e;
    pool_[slot].bucket = k;
    pool_[slot].next = heads_[k & mask_];
    heads_[k & mask_] = slot;
    if (size_ == 0 || k < current_) current_ = k;
    ++size_;
  }

  Event pop() {
    std::size_t misses = 0;
    for (;;) {
      std::uint32_t best = kNone, best_prev = kNone, prev = kNone;
      for (std::uint32_t s = heads_[current_ & mask_]; s != kNone; prev = s, s = pool_[s].next) {
        const Node& n = pool_[s];
        if (n.bucket != current_) continue;
        if (best == kNone || n.event.time < pool_[best].event.time ||
            (n.event.time == pool_[best].event.time && n.event.order < pool_[best].event.order)) {
          best = s;
          best_prev = prev;
        }
      }
      if (best != kNone) {
        if (best_prev == kNone) heads_[current_ & mask_] = pool_[best].next;
        else pool_[best_prev].next = pool_[best].next;
        const Event e = pool_[best].event;
        pool_[best].next = free_;
        free_ = best;
        --size_;
        return e;
      }
      ++current_;
      if (++misses > mask_) {
        // A whole year without events: jump straight to the earliest bucket.
        current_ = earliest();
        misses = 0;
      }
    }
  }

 private:
  static constexpr std::uint32_t kNone = static_cast<std::uint32_t>(-1);
  struct Node {
    Event event;
    std::uint64_t bucket = 0;
    std::uint32_t next = kNone;
  };

  std::uint64_t bucket_of(double t) const { return static_cast<std::uint64_t>(t / width_); }

  std::uint64_t earliest() const {
    std::uint64_t k = UINT64_MAX;
    for (std::uint32_t h : heads_) {
      for (std::uint32_t s = h; s != kNone; s = pool_[s].next) k = std::min(k, pool_[s].bucket);
    }
    return k;
  }

  std::vector<Node> pool_;
  std::vector<std::uint32_t> heads_;
  std::uint32_t free_ = kNone;
  std::size_t size_ = 0;
  std::uint64_t mask_ = 0;
  std::uint64_t current_ = 0;
  double width_ = 1.0;
};

class Engine {
 public:
  explicit Engine(const SimConfig& config) : cfg_(config) {
    users_ = cfg_.population.num_users();
    items_ = cfg_.population.num_items();
    caches_ = cfg_.num_caches();
    horizon_ = cfg_.horizon;
    t_start_ = cfg_.warmup_fraction() * horizon_;
    event_driven_ = cfg_.mode == OverhearingMode::kEventDriven;

    metrics_.caches = caches_;
    metrics_.items = items_;
    metrics_.mode = cfg_.mode;
    metrics_.measured_from = t_start_;
    metrics_.measured_to = horizon_;
    metrics_.counters.assign(caches_ * items_, ItemCounters{});
    metrics_.item_broadcasts.assign(items_, 0);
    metrics_.broadcast_gap_sum.assign(items_, 0.0);
    metrics_.broadcast_gaps.assign(items_, 0);
    last_broadcast_.assign(items_, -1.0);

    double rate = 0.0;
    for (std::size_t u = 0; u < users_; ++u) {
      for (const DemandProfile& p : cfg_.population.user_profiles(u)) rate += p.request_rate();
    }
    if (!event_driven_) {
      for (double l : cfg_.lambdas) rate += l;
    }
    queue_ = EventQueue(users_ * items_ + items_, rate);
  }

  SimMetrics run() {
    CacheOptions options;
    options.capacity = cfg_.capacity;
    options.size = cfg_.cache_size;
    options.baselines_overhear = cfg_.baselines_overhear;
    options.metrics_start = t_start_;
    caches_state_.reserve(caches_);
    for (std::size_t c = 0; c < caches_; ++c) {
      caches_state_.emplace_back(
          cfg_.policies[c],
          derive_seed(cfg_.seed, {static_cast<std::uint64_t>(StreamTag::kPolicy), c}), options);
    }

    // Request processes and the age of each cache's latest virtual request.
    std::vector<double> age(caches_ * items_, kInfinity);
    processes_.reserve(users_ * items_);
    for (std::size_t u = 0; u < users_; ++u) {
      const std::size_t c = cache_of(u);
      for (std::size_t i = 0; i < items_; ++i) {
        processes_.emplace_back(cfg_.population.profile(u, i),
                                request_stream_seed(cfg_.seed, u, i), cfg_.start);
        const RenewalProcess& p = processes_.back();
        age[c * items_ + i] = std::min(age[c * items_ + i], p.phase().age);
        if (p.next_time() < horizon_) {
          push(p.next_time(), kRequest, static_cast<std::uint32_t>(u * items_ + i), 0, 0);
        }
      }
    }

    for (std::size_t c = 0; c < caches_; ++c) {
      std::vector<std::size_t> order(items_);
      std::iota(order.begin(), order.end(), 0);
      // Oldest first, so LRU/LFU end with the most recent items in front.
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return age[c * items_ + x] > age[c * items_ + y];
      });
      for (std::size_t i : order) {
        const double rate = event_driven_ ? 0.0 : cfg_.lambdas[i];
        const auto out = caches_state_[c].initialize(i, age[c * items_ + i], rate);
        if (out.arm_timer && out.deadline < horizon_) {
          push(out.deadline, kTimer, static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(i),
               out.generation);
        }
      }
    }

    if (!event_driven_) {
      broadcast_rngs_.reserve(items_);
      for (std::size_t i = 0; i < items_; ++i) {
        broadcast_rngs_.emplace_back(
            derive_seed(cfg_.seed, {static_cast<std::uint64_t>(StreamTag::kBroadcast), i}));
        schedule_broadcast(i, 0.0);
      }
    }

    while (!queue_.empty()) {
      const Event e = queue_.pop();
      switch (e.kind()) {
        case kTimer:
          caches_state_[e.a].on_timer(e.b, e.time, e.generation);
          break;
        case kBroadcast:
          broadcast(e.a, e.time, event_driven_ ? e.b : kNoSource);
          if (!event_driven_) schedule_broadcast(e.a, e.time);
          break;
        case kRequest:
          request(e.a, e.time);
          break;
      }
    }

    for (std::size_t c = 0; c < caches_; ++c) {
      for (std::size_t i = 0; i < items_; ++i) {
        metrics_.counters[c * items_ + i].occupancy_time =
            caches_state_[c].occupancy_time(i, horizon_);
      }
    }
    return std::move(metrics_);
  }

 private:
  static constexpr std::uint32_t kNoSource = static_cast<std::uint32_t>(-1);

  std::size_t cache_of(std::size_t user) const {
    return cfg_.cache_of_user.empty() ? user : cfg_.cache_of_user[user];
  }

  void push(double t, EventKind kind, std::uint32_t a, std::uint32_t b, std::uint32_t gen) {
    queue_.push(Event{t, (static_cast<std::uint64_t>(kind) << 62) | counter_++, a, b, gen});
  }

  void schedule_broadcast(std::size_t item, double now) {
    const double rate = cfg_.lambdas[item];
    if (!(rate > 0.0)) return;
    const double t = now + broadcast_rngs_[item].exponential(rate);
    if (t < horizon_) push(t, kBroadcast, static_cast<std::uint32_t>(item), 0, 0);
  }

  void request(std::uint32_t pair, double t) {
    const std::size_t u = pair / items_;
    const std::size_t i = pair % items_;
    const std::size_t c = cache_of(u);
    RenewalProcess& proc = processes_[pair];
    proc.advance();
    if (proc.next_time() < horizon_) push(proc.next_time(), kRequest, pair, 0, 0);

    const auto out = caches_state_[c].on_request(i, t);
    if (out.arm_timer && out.deadline < horizon_) {
      push(out.deadline, kTimer, static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(i),
           out.generation);
    }
    const bool measured = t >= t_start_;
    ItemCounters& k = metrics_.counters[c * items_ + i];
    if (measured) {
      ++k.requests;
      if (out.hit) ++k.hits; else ++k.misses;
    }
    if (event_driven_ && !out.hit) {
      if (measured) ++k.broadcasts;
      if (cfg_.broadcast_delay > 0.0) {
        const double tb = t + cfg_.broadcast_delay;
        if (tb < horizon_) push(tb, kBroadcast, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(c), 0);
      } else {
        broadcast(i, t, static_cast<std::uint32_t>(c));
      }
    }
  }

  void broadcast(std::size_t item, double t, std::uint32_t source) {
    const bool measured = t >= t_start_;
    if (measured) {
      ++metrics_.item_broadcasts[item];
      if (last_broadcast_[item] >= t_start_) {
        metrics_.broadcast_gap_sum[item] += t - last_broadcast_[item];
        ++metrics_.broadcast_gaps[item];
      }
      last_broadcast_[item] = t;
    }
    for (std::size_t c = 0; c < caches_; ++c) {
      if (c == source) continue;
      if (caches_state_[c].on_overhear(item, t) && measured) {
        ++metrics_.counters[c * items_ + item].overheard_stores;
      }
    }
  }

  const SimConfig& cfg_;
  std::size_t users_ = 0, items_ = 0, caches_ = 0;
  double horizon_ = 0.0, t_start_ = 0.0;
  bool event_driven_ = false;
  std::uint64_t counter_ = 0;
  EventQueue queue_{1, 1.0};
  std::vector<CacheState> caches_state_;
  std::vector<RenewalProcess> processes_;
  std::vector<Rng> broadcast_rngs_;
  std::vector<double> last_broadcast_;
  SimMetrics metrics_;
};

}  // namespace

std::size_t SimConfig::num_caches() const {
  if (cache_of_user.empty()) return population.num_users();
  return *std::max_element(cache_of_user.begin(), cache_of_user.end()) + 1;
}

double SimConfig::warmup_fraction() const {
  if (warmup >= 0.0) return warmup;
  return start == StartMode::kStationary ? 0.0 : 0.1;
}

void validate(const SimConfig& config) {
  if (config.population.num_users() == 0) throw ModelError("simulation needs at least one user");
  if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
    throw ModelError("horizon must be positive and finite");
  }
  if (!(config.warmup_fraction() < 1.0)) throw ModelError("warmup fraction must be below 1");
  if (!config.cache_of_user.empty() && config.cache_of_user.size() != config.population.num_users()) {
    throw ModelError("cache_of_user must list one cache per user");
  }
  const std::size_t caches = config.num_caches();
  const std::size_t items = config.population.num_items();
  if (config.population.num_users() * items > 0xffffffffULL) throw ModelError("population too large");
  if (config.policies.size() != caches) throw ModelError("need one policy row per cache");
  for (const auto& row : config.policies) {
    if (row.size() != items) throw ModelError("need one policy per item in every cache");
  }
  if (config.mode == OverhearingMode::kTimeDriven) {
    if (config.lambdas.size() != items) throw ModelError("time-driven mode needs one rate per item");
    for (double l : config.lambdas) {
      if (!(l >= 0.0) || !std::isfinite(l)) throw ModelError("broadcast rates must be finite and nonnegative");
    }
  }
  if (!(config.broadcast_delay >= 0.0)) throw ModelError("broadcast delay must be nonnegative");
}

SimMetrics run(const SimConfig& config) {
  validate(config);
  Engine engine(config);
  return engine.run();
}

ItemCounters SimMetrics::item_total(std::size_t item) const {
  ItemCounters total;
  for (std::size_t c = 0; c < caches; ++c) {
    const ItemCounters& k = at(c, item);
    total.requests += k.requests;
    total.hits += k.hits;
    total.misses += k.misses;
    total.overheard_stores += k.overheard_stores;
    total.broadcasts += k.broadcasts;
    total.occupancy_time += k.occupancy_time;
  }
  return total;
}

double SimMetrics::overall_hit_ratio() const {
  std::uint64_t hits = 0, requests = 0;
  for (const ItemCounters& k : counters) {
    hits += k.hits;
    requests += k.requests;
  }
  return requests == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(requests);
}

std::optional<double> SimMetrics::item_hit_ratio(std::size_t item) const {
  const ItemCounters total = item_total(item);
  if (total.requests == 0) return std::nullopt;
  return static_cast<double>(total.hits) / static_cast<double>(total.requests);
}

double SimMetrics::cache_item_occupancy(std::size_t cache, std::size_t item) const {
  const double span = measured_time();
  return span > 0.0 ? at(cache, item).occupancy_time / span : 0.0;
}

double SimMetrics::item_occupancy(std::size_t item) const {
  double sum = 0.0;
  for (std::size_t c = 0; c < caches; ++c) sum += cache_item_occupancy(c, item);
  return caches == 0 ? 0.0 : sum / static_cast<double>(caches);
}

std::vector<std::optional<double>> interoverhear_stats(const SimMetrics& metrics) {
  std::vector<std::optional<double>> out(metrics.items);
  const bool listeners = metrics.mode == OverhearingMode::kTimeDriven || metrics.caches > 1;
  if (!listeners) return out;
  for (std::size_t i = 0; i < metrics.items; ++i) {
    if (metrics.broadcast_gaps[i] > 0) {
      out[i] = metrics.broadcast_gap_sum[i] / static_cast<double>(metrics.broadcast_gaps[i]);
    }
  }
  return out;
}

Estimate summarize(const std::vector<double>& values) {
  Estimate e;
  e.samples = values.size();
  if (values.empty()) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) {
    e.stderr_mean = std::nan("");
    return e;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  const double n = static_cast<double>(values.size());
  e.stderr_mean = std::sqrt(ss / (n - 1.0) / n);
  return e;
}

std::uint64_t replication_seed(std::uint64_t root, std::size_t k) {
  return derive_seed(root, {static_cast<std::uint64_t>(StreamTag::kReplication), k});
}

ReplicationResult replicate(const SimConfig& config, std::size_t n_reps) {
  if (n_reps == 0) throw ModelError("need at least one replication");
  validate(config);
  ReplicationResult result;
  result.runs.resize(n_reps);
  parallel_for(n_reps, [&](std::size_t k) {
    SimConfig c = config;
    c.seed = replication_seed(config.seed, k);
    result.runs[k] = run(c);
  });
  std::vector<double> overall;
  for (const SimMetrics& m : result.runs) overall.push_back(m.overall_hit_ratio());
  result.overall_hit_ratio = summarize(overall);
  const std::size_t items = config.population.num_items();
  result.item_hit_ratio.resize(items);
  result.item_occupancy.resize(items);
  for (std::size_t i = 0; i < items; ++i) {
    std::vector<double> h, r;
    for (const SimMetrics& m : result.runs) {
      if (const auto v = m.item_hit_ratio(i)) h.push_back(*v);
      r.push_back(m.item_occupancy(i));
    }
    result.item_hit_ratio[i] = summarize(h);
    result.item_occupancy[i] = summarize(r);
  }
  return result;
}

}  // namespace edgecache
