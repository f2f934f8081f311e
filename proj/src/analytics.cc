#include "edgecache/analytics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edgecache/error.h"

namespace edgecache {
namespace {

void require_recurrent(const DemandProfile& profile) {
  if (!profile.recurrent()) throw ModelError("closed forms need a finite OFF period");
}

void require_rate(double lambda) {
  if (!(lambda >= 0.0)) throw ModelError("overhearing rate must be nonnegative");
}

// Slack for comparing cumulative occupancy sums against b; absorbs the
// rounding in beta * (1 / beta).
double budget_slack(double b) { return 1e-9 * std::max(1.0, b); }

}  // namespace

HitOccupancy evaluate_co(const DemandProfile& profile, double lambda, const PolicyParams& params) {
  require_recurrent(profile);
  require_rate(lambda);
  PolicyParams::make(params.tau, params.omega);
  const double s = profile.s;
  const double beta = profile.beta;
  const double mean = profile.mean_gap();
  const double tau = params.tau;
  const double omega = params.omega;
  const bool overhears = lambda >= kMinOverhearRate;

  if (omega <= s) {
    // tau <= omega <= s
    if (!overhears) return {0.0, tau / mean};
    const double x = s - omega;
    const double decay = std::exp(-lambda * x);
    const double hit = 1.0 - beta / (lambda + beta) * decay;
    // beta e^{-lambda x} / (lambda (lambda + beta)) - 1/lambda, rearranged to
    // avoid cancelling two 1/lambda terms.
    const double tail = (beta * std::expm1(-lambda * x) - lambda) / (lambda * (lambda + beta));
    return {hit, (tau + tail + x + 1.0 / beta) / mean};
  }
  const double listen = overhears ? lambda / (lambda + beta) * std::exp(-beta * (omega - s)) : 0.0;
  if (tau <= s) {
    // tau <= s <= omega
    return {listen, (tau + listen / beta) / mean};
  }
  // s <= tau <= omega
  const double survive = std::exp(-beta * (tau - s));
  return {1.0 - survive + listen, 1.0 + (listen - survive) / (beta * mean)};
}

double hit_ratio_co(const DemandProfile& profile, double lambda, const PolicyParams& params) {
  return evaluate_co(profile, lambda, params).hit;
}

double occupancy_co(const DemandProfile& profile, double lambda, const PolicyParams& params) {
  return evaluate_co(profile, lambda, params).occupancy;
}

HitOccupancy evaluate_rco(const DemandProfile& profile, double lambda,
                          const RandomizedParams& params) {
  HitOccupancy out;
  for (std::size_t j = 0; j < params.size(); ++j) {
    if (params.q[j] == 0.0) continue;
    const HitOccupancy v = evaluate_co(profile, lambda, params.component(j));
    out.hit += params.q[j] * v.hit;
    out.occupancy += params.q[j] * v.occupancy;
  }
  return out;
}

double hit_ratio_rco(const DemandProfile& profile, double lambda, const RandomizedParams& params) {
  return evaluate_rco(profile, lambda, params).hit;
}

double occupancy_rco(const DemandProfile& profile, double lambda, const RandomizedParams& params) {
  return evaluate_rco(profile, lambda, params).occupancy;
}

HitOccupancy evaluate_policy(const DemandProfile& profile, double lambda, const ItemPolicy& policy) {
  return evaluate_rco(profile, lambda, as_randomized(policy));
}

HitOccupancy caching_only_part(const DemandProfile& profile, double tau) {
  require_recurrent(profile);
  if (!(tau >= 0.0)) throw ModelError("policy: tau must be nonnegative");
  const double mean = profile.mean_gap();
  if (tau <= profile.s) return {0.0, tau / mean};  // evicted before the OFF period ends
  if (tau == kInfinity) return {1.0, 1.0};
  // Hit iff X <= tau; occupancy E[min(X, tau)] / E[X].
  const double miss = std::exp(-profile.beta * (tau - profile.s));
  return {1.0 - miss, (profile.s + (1.0 - miss) / profile.beta) / mean};
}

HitOccupancy overhearing_only_part(const DemandProfile& profile, double lambda, double omega) {
  require_recurrent(profile);
  require_rate(lambda);
  if (!(omega >= 0.0)) throw ModelError("policy: omega must be nonnegative");
  if (lambda < kMinOverhearRate || omega == kInfinity) return {0.0, 0.0};
  const double s = profile.s;
  const double beta = profile.beta;
  const double mean = profile.mean_gap();
  // Y = first broadcast after omega. After the OFF period the remaining wait
  // for the request is Exp(beta), so a copy overheard then stays 1/beta.
  const double catch_in_on = lambda / (lambda + beta);
  if (omega >= s) {
    const double p = catch_in_on * std::exp(-beta * (omega - s));
    return {p, p / beta / mean};
  }
  // Overheard during the OFF period with probability 1 - e^{-lambda x}; the
  // copy then waits (s - omega - Y) + Exp(beta).
  const double x = s - omega;
  const double miss_off = std::exp(-lambda * x);
  const double p_off = -std::expm1(-lambda * x);
  // E[(x - Y) 1{Y < x}] for Y ~ Exp(lambda) equals x - p_off / lambda.
  const double off_wait = x - p_off / lambda;
  const double hit = p_off + miss_off * catch_in_on;
  const double held = off_wait + p_off / beta + miss_off * catch_in_on / beta;
  return {hit, held / mean};
}

SeparatedParts separability_check(const DemandProfile& profile, double lambda,
                                  const PolicyParams& params) {
  PolicyParams::make(params.tau, params.omega);
  return SeparatedParts{caching_only_part(profile, params.tau),
                        overhearing_only_part(profile, lambda, params.omega)};
}

UpperBound upper_bound(const Catalog& catalog, double b) {
  if (!(b > 0.0)) throw ModelError("cache size must be positive");
  const std::vector<double> p = popularity(catalog);
  const double slack = budget_slack(b);
  double used = 0.0;
  double h = 0.0;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const DemandProfile& d = catalog[i];
    const double need = d.recurrent() ? 1.0 / d.overhear_slope() : 0.0;
    if (used + need > b + slack) {
      const double rest = std::max(0.0, b - used);
      return UpperBound{std::min(1.0, h + p[i] * d.overhear_slope() * rest), i};
    }
    used += need;
    h += p[i];
  }
  return UpperBound{1.0, catalog.size()};
}

bool PopularSets::is_popular(std::size_t user, std::size_t item) const {
  const auto& row = popular[user];
  return std::find(row.begin(), row.end(), item) != row.end();
}

PopularSets popular_sets(const Population& population, double b) {
  if (!(b > 0.0)) throw ModelError("cache size must be positive");
  const std::size_t users = population.num_users();
  const std::size_t n = population.num_items();
  const double slack = budget_slack(b);
  PopularSets out;
  out.k.resize(users);
  out.order.resize(users);
  out.popular.resize(users);
  out.users_of_item.resize(n);
  for (std::size_t m = 0; m < users; ++m) {
    auto row = population.user_profiles(m);
    std::vector<std::size_t>& order = out.order[m];
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) { return row[a].beta > row[c].beta; });
    double used = 0.0;
    std::size_t k = 0;
    for (; k < n; ++k) {
      const DemandProfile& d = row[order[k]];
      const double need = d.recurrent() ? 1.0 / d.overhear_slope() : 0.0;
      if (used + need > b + slack) break;
      used += need;
    }
    out.k[m] = k;
    out.popular[m].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t item : out.popular[m]) out.users_of_item[item].push_back(m);
  }
  return out;
}

double homogeneous_gap_bound(const Catalog& catalog, double b, std::size_t caches) {
  if (caches == 0) throw ModelError("need at least one cache");
  const UpperBound ub = upper_bound(catalog, b);
  const std::size_t last = std::min(ub.k + 1, catalog.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < last; ++i) {
    if (!catalog[i].recurrent()) continue;
    worst = std::max(worst, 2.0 * std::sqrt(catalog[i].overhear_slope() / static_cast<double>(caches)));
  }
  return worst;
}

double heterogeneous_gap_bound(const Population& population, double b) {
  const PopularSets sets = popular_sets(population, b);
  double beta_max = 0.0;
  for (std::size_t m = 0; m < population.num_users(); ++m) {
    for (const auto& d : population.user_profiles(m)) beta_max = std::max(beta_max, d.beta);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < population.num_items(); ++i) {
    const auto& users = sets.users_of_item[i];
    if (users.empty()) continue;
    double rate = 0.0;
    for (std::size_t m : users) rate += population.profile(m, i).request_rate();
    if (rate <= 0.0) continue;
    worst = std::max(worst, 2.0 * std::sqrt(beta_max) / std::sqrt(rate));
  }
  return 1.0 / b + worst;
}

}  // namespace edgecache
