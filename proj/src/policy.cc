#include "edgecache/policy.h"

#include <cmath>
#include <cstdio>

#include "edgecache/error.h"

namespace edgecache {
namespace {

std::string fmt_time(double v) {
  if (v == kInfinity) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

PolicyParams PolicyParams::make(double tau, double omega) {
  if (!(tau >= 0.0)) throw ModelError("policy: tau must be nonnegative");
  if (!(omega >= tau)) throw ModelError("policy: omega must be >= tau");
  return PolicyParams{tau, omega};
}

RandomizedParams RandomizedParams::make(std::vector<double> q, std::vector<double> taus,
                                        std::vector<double> omegas) {
  if (q.empty()) throw ModelError("randomized policy needs at least one component");
  if (q.size() != taus.size() || q.size() != omegas.size()) {
    throw ModelError("randomized policy: q, taus and omegas must have equal length");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (!(q[j] >= 0.0 && q[j] <= 1.0)) throw ModelError("randomized policy: q must lie in [0, 1]");
    PolicyParams::make(taus[j], omegas[j]);
    total += q[j];
  }
  if (std::abs(total - 1.0) > 1e-9) throw ModelError("randomized policy: q must sum to 1");
  return RandomizedParams{std::move(q), std::move(taus), std::move(omegas)};
}

ItemPolicy never_cache() { return CoPolicy{PolicyParams{0.0, kInfinity}}; }
ItemPolicy always_cache() { return CacheOnlyPolicy{kInfinity}; }
ItemPolicy overhear_only(double omega) { return OverhearOnlyPolicy{omega}; }

ItemPolicy mixture(double q, PolicyParams first, PolicyParams second) {
  if (q >= 1.0) return CoPolicy{first};
  if (q <= 0.0) return CoPolicy{second};
  return RcoPolicy{RandomizedParams::make({q, 1.0 - q}, {first.tau, second.tau},
                                          {first.omega, second.omega})};
}

bool is_ttl_policy(const ItemPolicy& policy) { return !is_lru(policy) && !is_lfu(policy); }
bool is_lru(const ItemPolicy& policy) { return std::holds_alternative<LruPolicy>(policy); }
bool is_lfu(const ItemPolicy& policy) { return std::holds_alternative<LfuPolicy>(policy); }

RandomizedParams as_randomized(const ItemPolicy& policy) {
  if (const auto* co = std::get_if<CoPolicy>(&policy)) {
    return RandomizedParams{{1.0}, {co->params.tau}, {co->params.omega}};
  }
  if (const auto* rco = std::get_if<RcoPolicy>(&policy)) return rco->params;
  if (const auto* c = std::get_if<CacheOnlyPolicy>(&policy)) {
    return RandomizedParams{{1.0}, {c->tau}, {kInfinity}};
  }
  if (const auto* o = std::get_if<OverhearOnlyPolicy>(&policy)) {
    return RandomizedParams{{1.0}, {0.0}, {o->omega}};
  }
  throw ModelError("LRU/LFU policies have no TTL parameters");
}

void validate(const ItemPolicy& policy) {
  if (!is_ttl_policy(policy)) return;
  const RandomizedParams r = as_randomized(policy);
  RandomizedParams::make(r.q, r.taus, r.omegas);
}

std::string describe(const ItemPolicy& policy) {
  if (is_lru(policy)) return "lru";
  if (is_lfu(policy)) return "lfu";
  const RandomizedParams r = as_randomized(policy);
  std::string out;
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (!out.empty()) out += " + ";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g*", r.q[j]);
    out += buf;
    out += "co(" + fmt_time(r.taus[j]) + "," + fmt_time(r.omegas[j]) + ")";
  }
  return out;
}

}  // namespace edgecache
