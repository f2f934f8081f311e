#include "edgecache/demand.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "edgecache/error.h"

namespace edgecache {

DemandProfile DemandProfile::make(double s, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ModelError("demand profile: beta must be positive and finite, got " + std::to_string(beta));
  }
  if (!(s >= 0.0)) throw ModelError("demand profile: s must be nonnegative, got " + std::to_string(s));
  return DemandProfile{s, beta};
}

Catalog::Catalog(std::vector<DemandProfile> profiles) {
  if (profiles.empty()) throw ModelError("catalog must contain at least one item");
  for (const auto& p : profiles) DemandProfile::make(p.s, p.beta);
  permutation_.resize(profiles.size());
  std::iota(permutation_.begin(), permutation_.end(), std::size_t{0});
  std::stable_sort(permutation_.begin(), permutation_.end(), [&](std::size_t a, std::size_t b) {
    return profiles[a].beta > profiles[b].beta;
  });
  items_.reserve(profiles.size());
  for (std::size_t k : permutation_) items_.push_back(profiles[k]);
}

Population::Population(std::vector<std::vector<DemandProfile>> users) : users_(std::move(users)) {
  if (users_.empty()) throw ModelError("population must contain at least one user");
  const std::size_t n = users_.front().size();
  if (n == 0) throw ModelError("population users must have at least one item");
  homogeneous_ = true;
  for (const auto& row : users_) {
    if (row.size() != n) throw ModelError("population rows must have equal item counts");
    for (const auto& p : row) DemandProfile::make(p.s, p.beta);
    if (row != users_.front()) homogeneous_ = false;
  }
}

Population Population::homogeneous(const Catalog& catalog, std::size_t users) {
  if (users == 0) throw ModelError("population must contain at least one user");
  std::vector<DemandProfile> row(catalog.items().begin(), catalog.items().end());
  return Population(std::vector<std::vector<DemandProfile>>(users, row));
}

Population Population::heterogeneous(std::vector<std::vector<DemandProfile>> per_user) {
  return Population(std::move(per_user));
}

std::vector<double> popularity(std::span<const DemandProfile> items) {
  std::vector<double> p(items.size());
  double total = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    p[i] = items[i].request_rate();
    total += p[i];
  }
  if (!(total > 0.0)) throw ModelError("no recurrent demand");
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> user_share(const Population& population) {
  std::vector<double> nu(population.num_users(), 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < nu.size(); ++m) {
    for (const auto& p : population.user_profiles(m)) nu[m] += p.request_rate();
    total += nu[m];
  }
  if (!(total > 0.0)) throw ModelError("no recurrent demand");
  for (double& v : nu) v /= total;
  return nu;
}

double next_request_gap(const DemandProfile& profile, Rng& rng) {
  if (!profile.recurrent()) return kInfinity;
  return profile.s + rng.exponential(profile.beta);
}

RenewalPhase initial_phase(const DemandProfile& profile, StartMode mode, Rng& rng) {
  if (!profile.recurrent()) return RenewalPhase{kInfinity, kInfinity};
  if (mode == StartMode::kColdStart) return RenewalPhase{0.0, next_request_gap(profile, rng)};
  // The cycle covering t = 0 is length-biased: density x f(x) / E[X]. For
  // X = s + Exp(beta) that is s + Exp(beta) with weight s, and s + Gamma(2, beta)
  // with weight 1/beta. t = 0 sits uniformly inside it.
  const double mean = profile.mean_gap();
  double on_part = rng.exponential(profile.beta);
  if (rng.uniform() * mean >= profile.s) on_part += rng.exponential(profile.beta);
  const double cycle = profile.s + on_part;
  const double age = rng.uniform() * cycle;
  return RenewalPhase{age, cycle - age};
}

RenewalProcess::RenewalProcess(const DemandProfile& profile, std::uint64_t seed, StartMode mode)
    : profile_(profile), rng_(seed), phase_(initial_phase(profile, mode, rng_)), next_(phase_.residual) {}

double RenewalProcess::advance() {
  const double t = next_;
  next_ = t + next_request_gap(profile_, rng_);
  return t;
}

std::uint64_t request_stream_seed(std::uint64_t root, std::size_t user, std::size_t item) {
  return derive_seed(root, {static_cast<std::uint64_t>(StreamTag::kRequest), user, item});
}

RequestStream generate_stream(const Population& population, double horizon, std::uint64_t seed,
                              StartMode mode) {
  RequestStream out;
  out.horizon = horizon;
  for (std::size_t u = 0; u < population.num_users(); ++u) {
    for (std::size_t i = 0; i < population.num_items(); ++i) {
      RenewalProcess proc(population.profile(u, i), request_stream_seed(seed, u, i), mode);
      while (proc.next_time() < horizon) {
        out.requests.push_back(
            Request{proc.advance(), static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(i)});
      }
    }
  }
  std::sort(out.requests.begin(), out.requests.end(), [](const Request& a, const Request& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.user != b.user) return a.user < b.user;
    return a.item < b.item;
  });
  return out;
}

double zipf_constant(std::size_t n, double exponent) {
  double sum = 0.0;
  for (std::size_t i = n; i >= 1; --i) sum += std::pow(static_cast<double>(i), -exponent);
  return 1.0 / sum;
}

Catalog make_zipf_catalog(const ZipfSpec& spec) {
  if (spec.n == 0) throw ModelError("zipf catalog needs n >= 1");
  const double c = spec.c > 0.0 ? spec.c : zipf_constant(spec.n, spec.exponent);
  std::vector<DemandProfile> items;
  items.reserve(spec.n);
  for (std::size_t i = 1; i <= spec.n; ++i) {
    const double beta = c * std::pow(static_cast<double>(i), -spec.exponent);
    const double s = spec.s_inverse_beta ? 1.0 / beta : spec.s_constant;
    items.push_back(DemandProfile::make(s, beta));
  }
  return Catalog(std::move(items));
}

}  // namespace edgecache
