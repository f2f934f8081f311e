#ifndef EDGECACHE_POLICY_H_
#define EDGECACHE_POLICY_H_

#include <string>
#include <variant>
#include <vector>

#include "edgecache/demand.h"

namespace edgecache {

// Deterministic TTL pair: the item stays cached for `tau` after each request
// and ignores broadcasts for `omega` after it. Requires omega >= tau >= 0.
struct PolicyParams {
  double tau = 0.0;
  double omega = kInfinity;

  static PolicyParams make(double tau, double omega);
  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

// Per-request randomization over deterministic TTL pairs: at every request
// component j is drawn with probability q[j].
struct RandomizedParams {
  std::vector<double> q;
  std::vector<double> taus;
  std::vector<double> omegas;

  // Validates lengths, q in [0, 1] summing to one (1e-9), omega_j >= tau_j.
  static RandomizedParams make(std::vector<double> q, std::vector<double> taus,
                               std::vector<double> omegas);
  std::size_t size() const { return q.size(); }
  PolicyParams component(std::size_t j) const { return PolicyParams{taus[j], omegas[j]}; }
  friend bool operator==(const RandomizedParams&, const RandomizedParams&) = default;
};

struct CoPolicy {
  PolicyParams params;
  friend bool operator==(const CoPolicy&, const CoPolicy&) = default;
};
struct RcoPolicy {
  RandomizedParams params;
  friend bool operator==(const RcoPolicy&, const RcoPolicy&) = default;
};
// pi^c(tau) = CO(tau, +inf).
struct CacheOnlyPolicy {
  double tau = kInfinity;
  friend bool operator==(const CacheOnlyPolicy&, const CacheOnlyPolicy&) = default;
};
// pi^o(omega) = CO(0, omega).
struct OverhearOnlyPolicy {
  double omega = 0.0;
  friend bool operator==(const OverhearOnlyPolicy&, const OverhearOnlyPolicy&) = default;
};
struct LruPolicy {
  friend bool operator==(const LruPolicy&, const LruPolicy&) = default;
};
struct LfuPolicy {
  friend bool operator==(const LfuPolicy&, const LfuPolicy&) = default;
};

using ItemPolicy =
    std::variant<CoPolicy, RcoPolicy, CacheOnlyPolicy, OverhearOnlyPolicy, LruPolicy, LfuPolicy>;

// Common constructors.
ItemPolicy never_cache();                   // CO(0, +inf)
ItemPolicy always_cache();                  // pi^c(+inf)
ItemPolicy overhear_only(double omega);     // pi^o(omega)
// q * first + (1 - q) * second. Degenerate q collapses to the pure policy.
ItemPolicy mixture(double q, PolicyParams first, PolicyParams second);

bool is_ttl_policy(const ItemPolicy& policy);
bool is_lru(const ItemPolicy& policy);
bool is_lfu(const ItemPolicy& policy);

// Expresses any TTL variant as a randomized policy (n = 1 for deterministic
// ones). Throws ModelError for LRU/LFU.
RandomizedParams as_randomized(const ItemPolicy& policy);

// Validates the parameters carried by a TTL variant (throws ModelError).
void validate(const ItemPolicy& policy);

std::string describe(const ItemPolicy& policy);

}  // namespace edgecache

#endif  // EDGECACHE_POLICY_H_
