#ifndef EDGECACHE_VALIDATE_H_
#define EDGECACHE_VALIDATE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "edgecache/analytics.h"
#include "edgecache/simulator.h"

namespace edgecache {

// Closed-form (hit, occupancy) model of a deterministic TTL pair. The
// default is evaluate_co; tests inject broken variants.
using ClosedFormModel = std::function<HitOccupancy(const DemandProfile&, double, const PolicyParams&)>;

struct ClosedFormCase {
  DemandProfile profile;
  double lambda = 0.0;
  PolicyParams params;
};

// n random (s, beta, lambda, tau, omega) tuples cycling through the three
// orderings tau <= omega <= s, tau <= s <= omega, s <= tau <= omega.
std::vector<ClosedFormCase> random_closed_form_cases(std::size_t n, std::uint64_t seed);

struct OracleComparison {
  ClosedFormCase input;
  HitOccupancy theory;
  Estimate hit;
  Estimate occupancy;
  double renewals = 0.0;  // expected requests over all replications

  double z_hit() const;
  double z_occupancy() const;
};

// Single cache, time-driven broadcasts, stationary start: `reps`
// replications whose horizons add up to `renewals` expected requests.
OracleComparison compare_with_simulation(const ClosedFormCase& input, double renewals, std::size_t reps,
                                         std::uint64_t seed, const ClosedFormModel& model);

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  // Name and detail of the first failing check; empty when all pass.
  std::string first_failure() const;
};

struct ValidateOptions {
  bool quick = false;  // 1e4 instead of 1e5 renewals, fewer instances
  std::uint64_t seed = 20240611;
  ClosedFormModel model;  // empty: evaluate_co
};

ValidationReport run_validation(const ValidateOptions& options);

// Individual checks, each with its own random stream.
// Values equal to 1e-12 on both sides of tau = s and omega = s.
CheckResult check_region_continuity(const ClosedFormModel& model, std::uint64_t seed, std::size_t trials);
// Whole policy equals caching part plus overhearing part to 1e-12.
CheckResult check_separability(const ClosedFormModel& model, std::uint64_t seed, std::size_t points);
// Every deterministic pair on a 64 x 64 grid lies on or below the curve.
CheckResult check_curve_dominance(const ClosedFormModel& model, std::uint64_t seed, std::size_t items);
// Allocator within 1e-3 of the grid oracle, budget met, event-driven
// allocations with at most one item off a corner.
CheckResult check_solver_oracle(std::uint64_t seed, std::size_t instances);

}  // namespace edgecache

#endif  // EDGECACHE_VALIDATE_H_
