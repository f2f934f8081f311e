#ifndef EDGECACHE_DEMAND_H_
#define EDGECACHE_DEMAND_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "edgecache/rng.h"

namespace edgecache {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ON-OFF renewal demand of one user for one item: after every request a
// silent OFF period of length `s` follows, then requests arrive at Poisson
// rate `beta` until the next one renews the cycle. `s` may be +inf, meaning
// the item is never requested again.
struct DemandProfile {
  double s = 0.0;
  double beta = 1.0;

  // Throws ModelError unless beta > 0 and s >= 0.
  static DemandProfile make(double s, double beta);

  bool recurrent() const { return s < kInfinity; }
  // E[X] = s + 1/beta; +inf when s is +inf.
  double mean_gap() const { return s + 1.0 / beta; }
  // Long-run request rate 1/E[X]; 0 for non-recurrent items.
  double request_rate() const { return recurrent() ? 1.0 / mean_gap() : 0.0; }
  // beta*s + 1, the hit-per-occupancy slope of overhearing after the OFF period.
  double overhear_slope() const { return beta * s + 1.0; }

  friend bool operator==(const DemandProfile&, const DemandProfile&) = default;
};

// Item catalog for one user population, sorted by nonincreasing beta.
class Catalog {
 public:
  // Sorts (stably) by beta descending; `original_index(k)` recovers the
  // position of sorted item k in `profiles`. Throws on an empty list.
  explicit Catalog(std::vector<DemandProfile> profiles);

  std::size_t size() const { return items_.size(); }
  const DemandProfile& operator[](std::size_t i) const { return items_[i]; }
  std::span<const DemandProfile> items() const { return items_; }
  std::size_t original_index(std::size_t i) const { return permutation_[i]; }

 private:
  std::vector<DemandProfile> items_;
  std::vector<std::size_t> permutation_;
};

// Per-user demand. Item indices are shared across users (item k is the same
// data item for every user); each user's profiles are kept in that order.
class Population {
 public:
  Population() = default;  // empty; only useful as a placeholder
  static Population homogeneous(const Catalog& catalog, std::size_t users);
  // Every row must have the same length. The homogeneous flag is derived.
  static Population heterogeneous(std::vector<std::vector<DemandProfile>> per_user);

  std::size_t num_users() const { return users_.size(); }
  std::size_t num_items() const { return users_.front().size(); }
  bool is_homogeneous() const { return homogeneous_; }
  const DemandProfile& profile(std::size_t user, std::size_t item) const {
    return users_[user][item];
  }
  std::span<const DemandProfile> user_profiles(std::size_t user) const { return users_[user]; }

 private:
  explicit Population(std::vector<std::vector<DemandProfile>> users);

  std::vector<std::vector<DemandProfile>> users_;
  bool homogeneous_ = false;
};

// Request probabilities p_i = rate_i / sum_j rate_j with rate = 1/E[X].
// Throws ModelError("no recurrent demand") if every item has s = +inf.
std::vector<double> popularity(std::span<const DemandProfile> items);
inline std::vector<double> popularity(const Catalog& catalog) {
  return popularity(catalog.items());
}

// Fraction of all requests issued by each user.
std::vector<double> user_share(const Population& population);

// One renewal gap s + Exp(beta); +inf for non-recurrent profiles.
double next_request_gap(const DemandProfile& profile, Rng& rng);

// Position of t = 0 inside a renewal cycle: the last request happened at
// -age and the next one arrives at +residual.
struct RenewalPhase {
  double age = 0.0;
  double residual = kInfinity;
};

enum class StartMode {
  kStationary,  // t = 0 falls at an equilibrium-distributed phase
  kColdStart,   // a virtual request sits exactly at t = 0
};

RenewalPhase initial_phase(const DemandProfile& profile, StartMode mode, Rng& rng);

// Lazily generated request epochs of one (user, item) pair.
class RenewalProcess {
 public:
  RenewalProcess(const DemandProfile& profile, std::uint64_t seed, StartMode mode);

  const RenewalPhase& phase() const { return phase_; }
  double next_time() const { return next_; }
  // Consumes the pending epoch and draws the following one.
  double advance();

 private:
  DemandProfile profile_;
  Rng rng_;
  RenewalPhase phase_;
  double next_;
};

// Seed of the (user, item) request sub-stream.
std::uint64_t request_stream_seed(std::uint64_t root, std::size_t user, std::size_t item);

struct Request {
  double time;
  std::uint32_t user;
  std::uint32_t item;
};

struct RequestStream {
  std::vector<Request> requests;  // sorted by (time, user, item)
  double horizon = 0.0;
};

// Materializes every request in [0, horizon). Uses the same sub-streams as
// the simulator, so a stream and a simulation with equal seeds agree.
RequestStream generate_stream(const Population& population, double horizon, std::uint64_t seed,
                              StartMode mode = StartMode::kStationary);

// beta_i = c * i^-exponent, i = 1..n. With c <= 0 the constant is chosen so
// the betas sum to one.
struct ZipfSpec {
  std::size_t n = 1000;
  double exponent = 0.8;
  double c = 0.0;
  // OFF period rule: s_i = 1/beta_i when `s_inverse_beta`, else `s_constant`.
  bool s_inverse_beta = true;
  double s_constant = 0.0;
};

double zipf_constant(std::size_t n, double exponent);
Catalog make_zipf_catalog(const ZipfSpec& spec);

}  // namespace edgecache

#endif  // EDGECACHE_DEMAND_H_
