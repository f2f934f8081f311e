#include "edgecache/cache_state.h"

#include <algorithm>
#include <cmath>

#include "edgecache/demand.h"
#include "edgecache/error.h"

namespace edgecache {

CacheState::CacheState(std::vector<ItemPolicy> policies, std::uint64_t seed, CacheOptions options)
    : options_(options) {
  if (policies.empty()) throw ModelError("cache needs at least one item");
  const bool first_lru = is_lru(policies.front());
  const bool first_lfu = is_lfu(policies.front());
  for (const ItemPolicy& p : policies) {
    if (is_lru(p) != first_lru || is_lfu(p) != first_lfu) {
      throw ModelError("LRU/LFU must govern every item of a cache or none");
    }
    validate(p);
  }
  kind_ = first_lru ? Kind::kLru : first_lfu ? Kind::kLfu : Kind::kTtl;
  if ((kind_ != Kind::kTtl || options_.capacity == CapacityMode::kHard) && capacity_items() == 0) {
    throw ModelError("cache size must be at least one item for LRU, LFU or hard capacity");
  }

  const std::size_t n = policies.size();
  items_.resize(n);
  if (kind_ == Kind::kTtl) {
    rngs_.reserve(n);
    compiled_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const RandomizedParams rp = as_randomized(policies[i]);
      Compiled c;
      double acc = 0.0;
      for (std::size_t j = 0; j < rp.size(); ++j) {
        acc += rp.q[j];
        c.cumulative.push_back(acc);
        c.components.push_back(rp.component(j));
      }
      c.cumulative.back() = 1.0;
      items_[i].policy = static_cast<std::uint32_t>(compiled_.size());
      compiled_.push_back(std::move(c));
      rngs_.emplace_back(derive_seed(seed, {i}));
    }
  } else if (kind_ == Kind::kLru) {
    prev_.assign(n, kNil);
    next_.assign(n, kNil);
  } else {
    counts_.assign(n, 0);
    last_use_.assign(n, 0);
  }
}

std::size_t CacheState::capacity_items() const {
  return static_cast<std::size_t>(std::floor(options_.size + 1e-9));
}

PolicyParams CacheState::sample(std::size_t item) {
  const Compiled& c = compiled_[items_[item].policy];
  if (c.components.size() == 1) return c.components.front();
  const double u = rngs_[item].uniform();
  const auto it = std::upper_bound(c.cumulative.begin(), c.cumulative.end(), u);
  const std::size_t j = std::min<std::size_t>(it - c.cumulative.begin(), c.components.size() - 1);
  return c.components[j];
}

void CacheState::load(std::size_t item, double t) {
  ItemState& s = items_[item];
  if (s.cached) return;
  s.cached = true;
  s.cached_since = t;
  ++cached_count_;
}

void CacheState::evict(std::size_t item, double t) {
  ItemState& s = items_[item];
  if (!s.cached) return;
  const double from = std::max(s.cached_since, options_.metrics_start);
  if (t > from) s.occupancy += t - from;
  s.cached = false;
  --cached_count_;
}

// Hard capacity: frees one slot by evicting the cached item whose caching
// timer runs out first (overheard copies count as never expiring).
bool CacheState::make_room(double t) {
  if (cached_count_ < capacity_items()) return true;
  std::size_t victim = kNil;
  double best = kInfinity;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (!items_[i].cached) continue;
    if (victim == kNil || items_[i].caching_deadline < best) {
      victim = i;
      best = items_[i].caching_deadline;
    }
  }
  if (victim == kNil) return false;
  ++items_[victim].generation;
  evict(victim, t);
  return true;
}

void CacheState::lru_unlink(std::size_t item) {
  const std::size_t p = prev_[item], n = next_[item];
  if (p != kNil) next_[p] = n; else head_ = n;
  if (n != kNil) prev_[n] = p; else tail_ = p;
  prev_[item] = next_[item] = kNil;
}

void CacheState::lru_touch(std::size_t item) {
  if (items_[item].cached) lru_unlink(item);
  prev_[item] = kNil;
  next_[item] = head_;
  if (head_ != kNil) prev_[head_] = item;
  head_ = item;
  if (tail_ == kNil) tail_ = item;
}

CacheState::RequestOutcome CacheState::lfu_request(std::size_t item, double t) {
  RequestOutcome out;
  ItemState& s = items_[item];
  out.hit = s.cached;
  if (s.cached) lfu_order_.erase({counts_[item], last_use_[item], item});
  ++counts_[item];
  last_use_[item] = ++tick_;
  if (s.cached) {
    lfu_order_.insert({counts_[item], last_use_[item], item});
    return out;
  }
  if (cached_count_ >= capacity_items()) {
    const auto victim = lfu_order_.begin();
    if (std::get<0>(*victim) > counts_[item]) return out;  // not frequent enough to enter
    const std::size_t v = std::get<2>(*victim);
    lfu_order_.erase(victim);
    evict(v, t);
  }
  load(item, t);
  lfu_order_.insert({counts_[item], last_use_[item], item});
  return out;
}

CacheState::RequestOutcome CacheState::on_request(std::size_t item, double t) {
  if (item >= items_.size()) throw ModelError("unknown item index");
  ItemState& s = items_[item];
  RequestOutcome out;
  if (kind_ == Kind::kLru) {
    out.hit = s.cached;
    lru_touch(item);
    if (!s.cached) {
      load(item, t);
      if (cached_count_ > capacity_items()) {
        const std::size_t victim = tail_;
        lru_unlink(victim);
        evict(victim, t);
      }
    }
    return out;
  }
  if (kind_ == Kind::kLfu) return lfu_request(item, t);

  out.hit = s.cached;
  const PolicyParams p = sample(item);
  ++s.generation;
  s.deaf_deadline = t + p.omega;
  if (p.tau <= 0.0) {
    // Served and dropped at once.
    evict(item, t);
    s.caching_deadline = t;
    return out;
  }
  if (!s.cached && options_.capacity == CapacityMode::kHard && !make_room(t)) return out;
  load(item, t);
  s.caching_deadline = t + p.tau;
  if (p.tau < kInfinity) {
    out.arm_timer = true;
    out.deadline = s.caching_deadline;
    out.generation = s.generation;
  }
  return out;
}

bool CacheState::on_timer(std::size_t item, double t, std::uint32_t generation) {
  if (kind_ != Kind::kTtl) return false;
  ItemState& s = items_[item];
  if (s.generation != generation || !s.cached) return false;
  evict(item, t);
  return true;
}

bool CacheState::on_overhear(std::size_t item, double t) {
  ItemState& s = items_[item];
  if (s.cached) return false;
  if (kind_ != Kind::kTtl) {
    if (!options_.baselines_overhear) return false;
    if (kind_ == Kind::kLru) {
      lru_touch(item);
      load(item, t);
      if (cached_count_ > capacity_items()) {
        const std::size_t victim = tail_;
        lru_unlink(victim);
        evict(victim, t);
      }
      return s.cached;
    }
    if (cached_count_ >= capacity_items()) {
      const auto victim = lfu_order_.begin();
      if (std::get<0>(*victim) > counts_[item]) return false;
      const std::size_t v = std::get<2>(*victim);
      lfu_order_.erase(victim);
      evict(v, t);
    }
    last_use_[item] = ++tick_;
    load(item, t);
    lfu_order_.insert({counts_[item], last_use_[item], item});
    return true;
  }
  if (t < s.deaf_deadline) return false;
  if (options_.capacity == CapacityMode::kHard && cached_count_ >= capacity_items()) return false;
  load(item, t);
  // Overheard copies stay until the next request for the item.
  s.caching_deadline = kInfinity;
  ++s.generation;
  return true;
}

CacheState::RequestOutcome CacheState::initialize(std::size_t item, double age, double overhear_rate) {
  ItemState& s = items_[item];
  RequestOutcome out;
  if (!(age < kInfinity)) {
    s.deaf_deadline = kInfinity;
    return out;
  }
  if (kind_ == Kind::kLru) {
    if (!s.cached) {
      lru_touch(item);
      load(item, 0.0);
      if (cached_count_ > capacity_items()) {
        const std::size_t victim = tail_;
        lru_unlink(victim);
        evict(victim, 0.0);
      }
    } else {
      lru_touch(item);
    }
    return out;
  }
  if (kind_ == Kind::kLfu) {
    last_use_[item] = ++tick_;
    if (cached_count_ >= capacity_items()) {
      const auto victim = lfu_order_.begin();
      const std::size_t v = std::get<2>(*victim);
      lfu_order_.erase(victim);
      evict(v, 0.0);
    }
    load(item, 0.0);
    lfu_order_.insert({counts_[item], last_use_[item], item});
    return out;
  }

  const PolicyParams p = sample(item);
  ++s.generation;
  s.deaf_deadline = p.omega - age;
  if (p.tau > age) {
    if (options_.capacity == CapacityMode::kHard && !make_room(0.0)) return out;
    load(item, 0.0);
    s.caching_deadline = p.tau - age;
    if (p.tau < kInfinity) {
      out.arm_timer = true;
      out.deadline = s.caching_deadline;
      out.generation = s.generation;
    }
    return out;
  }
  if (overhear_rate > 0.0 && age > p.omega) {
    const double heard = -std::expm1(-overhear_rate * (age - p.omega));
    if (rngs_[item].uniform() < heard) {
      if (options_.capacity == CapacityMode::kHard && cached_count_ >= capacity_items()) return out;
      load(item, 0.0);
      s.caching_deadline = kInfinity;
    }
  }
  return out;
}

double CacheState::occupancy_time(std::size_t item, double t) const {
  const ItemState& s = items_[item];
  double total = s.occupancy;
  if (s.cached) {
    const double from = std::max(s.cached_since, options_.metrics_start);
    if (t > from) total += t - from;
  }
  return total;
}

std::vector<double> CacheState::audit_occupancy(double t) const {
  std::vector<double> out(items_.size(), 0.0);
  const double span = t - options_.metrics_start;
  if (!(span > 0.0)) return out;
  for (std::size_t i = 0; i < items_.size(); ++i) out[i] = occupancy_time(i, t) / span;
  return out;
}

}  // namespace edgecache
