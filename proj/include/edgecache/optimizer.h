#ifndef EDGECACHE_OPTIMIZER_H_
#define EDGECACHE_OPTIMIZER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "edgecache/analytics.h"
#include "edgecache/curve.h"
#include "edgecache/demand.h"
#include "edgecache/policy.h"

namespace edgecache {

// Target occupancies and the item policies realizing them.
struct Allocation {
  std::vector<double> r_star;
  std::vector<ItemPolicy> policies;
  double objective = 0.0;  // sum_i p_i h_i(r_i)
};

// Maximizes sum_i p_i h_i(r_i) s.t. sum_i r_i <= b, 0 <= r_i <= 1, for
// concave curves of a single overhearing mode. Water-filling: bisect the
// common marginal level mu, then hand the budget left over at the level to
// tied items in index order, so piecewise-linear curves end with at most one
// coordinate off {0, breakpoint, 1}. Throws on mixed modes or b <= 0.
Allocation allocate(std::span<const OccupancyCurve> curves, std::span<const double> p, double b);

// Exhaustive optimum over the grid r_i in {0, step, 2 step, ..., 1} with the
// budget discretized to whole steps (knapsack DP over the grid, so it is
// exact for the grid and independent of concavity). Test oracle.
double grid_oracle_objective(std::span<const OccupancyCurve> curves, std::span<const double> p,
                             double b, int steps_per_unit = 256);

// Checks budget feasibility and that at most one coordinate is off
// {0, breakpoint, 1} (within tol). Returns false instead of throwing.
bool satisfies_budget(const Allocation& allocation, double b, double tol = 1e-9);
std::size_t count_exceptional(const Allocation& allocation, std::span<const OccupancyCurve> curves,
                              double tol = 1e-9);

std::vector<OccupancyCurve> time_driven_curves(const Catalog& catalog, std::span<const double> lambdas,
                                               PolicyFamily family);
std::vector<OccupancyCurve> event_driven_curves(const Catalog& catalog,
                                                std::span<const double> breakpoints,
                                                PolicyFamily family);

// Time-driven optimum: each item gets pi^o(omega*) or the mixture
// q* pi^c(inf) + (1 - q*) pi^o(0).
Allocation solve_time_driven(const Catalog& catalog, std::span<const double> lambdas, double b);

// Occupancy of pi^o(s_i) under event-driven overhearing, measured by an
// estimation run.
struct OccupancyEstimate {
  std::size_t item = 0;
  double r_bar = 0.0;
  double horizon = 0.0;
};

// Runs every item under pi^o(s_i) with miss-triggered broadcasts for
// `horizon` time units and reports the time-averaged occupancy per item,
// averaged over caches.
std::vector<OccupancyEstimate> estimate_occupancies(const Population& population, double horizon,
                                                    std::uint64_t seed);

// Event-driven policy over mixtures of pi^c(inf) and pi^o(s_i), with the
// breakpoint of item i set to its estimate clipped to [0, 1/(beta_i s_i + 1)].
Allocation solve_event_driven(const Catalog& catalog, double b,
                              std::span<const OccupancyEstimate> estimates);

struct BenchmarkAllocations {
  Allocation caching_only;
  Allocation overhearing_only;
};
// Restricted optima with tau = 0 (overhearing only) or omega = inf (caching only).
BenchmarkAllocations solve_benchmarks(const Catalog& catalog, std::span<const double> lambdas,
                                      double b);
Allocation solve_caching_only(const Catalog& catalog, double b);
Allocation solve_overhearing_only_event_driven(const Catalog& catalog, double b,
                                               std::span<const OccupancyEstimate> estimates);

// Heterogeneous demand, time-driven: one independent solve per cache.
std::vector<Allocation> solve_heterogeneous_time_driven(const Population& population,
                                                        std::span<const double> lambdas, double b);

// Heterogeneous demand, event-driven: cache m runs pi^o(s_i^(m)) on its
// popular items and never caches the rest.
struct OverhearOnlyPlan {
  PopularSets sets;
  std::vector<std::vector<ItemPolicy>> policies;  // [cache][item]
};
OverhearOnlyPlan solve_heterogeneous(const Population& population, double b);

}  // namespace edgecache

#endif  // EDGECACHE_OPTIMIZER_H_
