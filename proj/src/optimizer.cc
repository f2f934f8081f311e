#include "edgecache/optimizer.h"

#include <algorithm>
#include <cmath>

#include "edgecache/error.h"
#include "edgecache/simulator.h"

namespace edgecache {
namespace {

constexpr int kLevelIterations = 300;

// Placeholder curve for items that are never requested (p_i = 0); the
// allocator gives them nothing regardless.
const DemandProfile kSilentProfile{0.0, 1.0};

double total_at(std::span<const OccupancyCurve> curves, std::span<const double> p, double level) {
  double sum = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (p[i] > 0.0) sum += curves[i].occupancy_at_slope(level / p[i]);
  }
  return sum;
}

Allocation finish(std::span<const OccupancyCurve> curves, std::span<const double> p,
                  std::vector<double> r) {
  Allocation a;
  a.policies.reserve(curves.size());
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (p[i] > 0.0) {
      a.objective += p[i] * curves[i].hit(r[i]);
      a.policies.push_back(curves[i].policy_for(r[i]));
    } else {
      r[i] = 0.0;
      a.policies.push_back(never_cache());
    }
  }
  a.r_star = std::move(r);
  return a;
}

// Candidate occupancies of one item for the oracle: the uniform grid plus
// the curve's own corner points.
std::vector<double> oracle_points(const OccupancyCurve& curve, int steps) {
  std::vector<double> pts;
  for (int k = 0; k <= steps; ++k) pts.push_back(static_cast<double>(k) / steps);
  pts.push_back(curve.breakpoint());
  pts.push_back(std::min(1.0, curve.max_useful_occupancy()));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

struct Point {
  double cost;
  double value;
};

// Keeps the points that no cheaper point beats.
void prune(std::vector<Point>& pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& x, const Point& y) {
    if (x.cost != y.cost) return x.cost < y.cost;
    return x.value > y.value;
  });
  std::vector<Point> kept;
  double best = -1.0;
  for (const Point& q : pts) {
    if (q.value > best + 1e-15) {
      kept.push_back(q);
      best = q.value;
    }
  }
  pts.swap(kept);
}

std::vector<OccupancyCurve> curves_for(std::span<const DemandProfile> items, std::span<const double> lambdas,
                                       PolicyFamily family) {
  if (lambdas.size() != items.size()) throw ModelError("need one broadcast rate per item");
  std::vector<OccupancyCurve> curves;
  curves.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const DemandProfile& prof = items[i].recurrent() ? items[i] : kSilentProfile;
    curves.push_back(OccupancyCurve::time_driven(prof, lambdas[i], family));
  }
  return curves;
}

Allocation solve_profiles(std::span<const DemandProfile> items, std::span<const double> lambdas,
                          double b, PolicyFamily family) {
  const std::vector<OccupancyCurve> curves = curves_for(items, lambdas, family);
  const std::vector<double> p = popularity(items);
  return allocate(curves, p, b);
}

std::vector<double> breakpoints_from(const Catalog& catalog,
                                     std::span<const OccupancyEstimate> estimates) {
  std::vector<double> bp(catalog.size(), -1.0);
  for (const OccupancyEstimate& e : estimates) {
    if (e.item >= catalog.size()) throw ModelError("occupancy estimate for an unknown item");
    bp[e.item] = e.r_bar;
  }
  for (std::size_t i = 0; i < bp.size(); ++i) {
    if (bp[i] < 0.0) throw ModelError("missing occupancy estimate for an item");
    bp[i] = std::clamp(bp[i], 0.0, 1.0 / catalog[i].overhear_slope());
  }
  return bp;
}

}  // namespace

Allocation allocate(std::span<const OccupancyCurve> curves, std::span<const double> p, double b) {
  if (curves.size() != p.size()) throw ModelError("need one popularity per curve");
  if (curves.empty()) throw ModelError("nothing to allocate");
  if (!(b > 0.0)) throw ModelError("cache size must be positive");
  for (const OccupancyCurve& c : curves) {
    if (c.mode() != curves.front().mode()) throw ModelError("curves mix time- and event-driven overhearing");
  }
  const std::size_t n = curves.size();
  std::vector<double> r(n, 0.0);

  double room = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0) room += curves[i].max_useful_occupancy();
  }
  if (room <= b) {
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i] > 0.0) r[i] = curves[i].max_useful_occupancy();
    }
    return finish(curves, p, std::move(r));
  }

  // Bracket the marginal level: G(lo) > b >= G(hi).
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    hi = std::max(hi, p[i] * curves[i].profile().overhear_slope());
  }
  hi = hi * (1.0 + 1e-9) + 1e-300;
  for (int it = 0; it < kLevelIterations && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (total_at(curves, p, mid) > b) lo = mid; else hi = mid;
  }

  double used = 0.0;
  std::vector<double> upper(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(p[i] > 0.0)) continue;
    r[i] = curves[i].occupancy_at_slope(hi / p[i]);
    upper[i] = curves[i].occupancy_at_slope(lo / p[i]);
    used += r[i];
  }
  // Items tied at the level share the leftover budget in index order.
  double left = b - used;
  for (std::size_t i = 0; i < n && left > 0.0; ++i) {
    const double extra = std::min(left, upper[i] - r[i]);
    if (extra > 0.0) {
      r[i] += extra;
      left -= extra;
    }
  }
  return finish(curves, p, std::move(r));
}

double grid_oracle_objective(std::span<const OccupancyCurve> curves, std::span<const double> p,
                             double b, int steps_per_unit) {
  if (curves.size() != p.size() || curves.empty()) throw ModelError("oracle needs one popularity per curve");
  if (steps_per_unit < 1) throw ModelError("oracle grid needs at least one step");
  const std::size_t n = curves.size();
  std::vector<std::vector<Point>> options(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (double r : oracle_points(curves[i], steps_per_unit)) {
      options[i].push_back(Point{r, p[i] * curves[i].hit(r)});
    }
  }
  // Every item but `free_item` is restricted to its candidate points; the
  // free item takes whatever budget is left (its best use for concave or
  // piecewise-linear curves is to take all of it).
  double best = 0.0;
  for (std::size_t free_item = 0; free_item < n; ++free_item) {
    std::vector<Point> frontier{{0.0, 0.0}};
    for (std::size_t i = 0; i < n; ++i) {
      if (i == free_item) continue;
      std::vector<Point> next;
      next.reserve(frontier.size() * options[i].size());
      for (const Point& f : frontier) {
        for (const Point& o : options[i]) {
          if (f.cost + o.cost <= b + 1e-12) next.push_back(Point{f.cost + o.cost, f.value + o.value});
        }
      }
      prune(next);
      frontier.swap(next);
    }
    for (const Point& f : frontier) {
      const double r = std::clamp(b - f.cost, 0.0, 1.0);
      best = std::max(best, f.value + p[free_item] * curves[free_item].hit(r));
    }
  }
  return best;
}

bool satisfies_budget(const Allocation& allocation, double b, double tol) {
  double sum = 0.0;
  for (double r : allocation.r_star) {
    if (r < -tol || r > 1.0 + tol) return false;
    sum += r;
  }
  return sum <= b + tol;
}

std::size_t count_exceptional(const Allocation& allocation, std::span<const OccupancyCurve> curves,
                              double tol) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < allocation.r_star.size(); ++i) {
    const double r = allocation.r_star[i];
    const bool corner = std::abs(r) <= tol || std::abs(r - 1.0) <= tol ||
                        std::abs(r - curves[i].breakpoint()) <= tol;
    if (!corner) ++count;
  }
  return count;
}

std::vector<OccupancyCurve> time_driven_curves(const Catalog& catalog, std::span<const double> lambdas,
                                               PolicyFamily family) {
  return curves_for(catalog.items(), lambdas, family);
}

std::vector<OccupancyCurve> event_driven_curves(const Catalog& catalog,
                                                std::span<const double> breakpoints,
                                                PolicyFamily family) {
  if (breakpoints.size() != catalog.size()) throw ModelError("need one breakpoint per item");
  std::vector<OccupancyCurve> curves;
  curves.reserve(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const DemandProfile& prof = catalog[i].recurrent() ? catalog[i] : kSilentProfile;
    curves.push_back(OccupancyCurve::event_driven(prof, breakpoints[i], family));
  }
  return curves;
}

Allocation solve_time_driven(const Catalog& catalog, std::span<const double> lambdas, double b) {
  return solve_profiles(catalog.items(), lambdas, b, PolicyFamily::kCachingAndOverhearing);
}

std::vector<OccupancyEstimate> estimate_occupancies(const Population& population, double horizon,
                                                    std::uint64_t seed) {
  if (!(horizon > 0.0)) throw ModelError("estimation horizon must be positive");
  SimConfig cfg;
  cfg.population = population;
  cfg.mode = OverhearingMode::kEventDriven;
  cfg.horizon = horizon;
  cfg.seed = derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::kEstimation)});
  cfg.start = StartMode::kStationary;
  cfg.warmup = 0.1;
  const std::size_t items = population.num_items();
  cfg.policies.resize(population.num_users());
  for (std::size_t m = 0; m < population.num_users(); ++m) {
    cfg.policies[m].reserve(items);
    for (std::size_t i = 0; i < items; ++i) {
      const DemandProfile& prof = population.profile(m, i);
      cfg.policies[m].push_back(prof.recurrent() ? overhear_only(prof.s) : never_cache());
    }
  }
  const SimMetrics metrics = run(cfg);
  std::vector<OccupancyEstimate> out(items);
  for (std::size_t i = 0; i < items; ++i) {
    out[i] = OccupancyEstimate{i, metrics.item_occupancy(i), horizon};
  }
  return out;
}

Allocation solve_event_driven(const Catalog& catalog, double b,
                              std::span<const OccupancyEstimate> estimates) {
  const std::vector<double> bp = breakpoints_from(catalog, estimates);
  const auto curves = event_driven_curves(catalog, bp, PolicyFamily::kCachingAndOverhearing);
  return allocate(curves, popularity(catalog), b);
}

Allocation solve_caching_only(const Catalog& catalog, double b) {
  const std::vector<double> zero(catalog.size(), 0.0);
  return solve_profiles(catalog.items(), zero, b, PolicyFamily::kCachingOnly);
}

BenchmarkAllocations solve_benchmarks(const Catalog& catalog, std::span<const double> lambdas, double b) {
  BenchmarkAllocations out;
  out.caching_only = solve_caching_only(catalog, b);
  out.overhearing_only = solve_profiles(catalog.items(), lambdas, b, PolicyFamily::kOverhearingOnly);
  return out;
}

Allocation solve_overhearing_only_event_driven(const Catalog& catalog, double b,
                                               std::span<const OccupancyEstimate> estimates) {
  const std::vector<double> bp = breakpoints_from(catalog, estimates);
  const auto curves = event_driven_curves(catalog, bp, PolicyFamily::kOverhearingOnly);
  return allocate(curves, popularity(catalog), b);
}

std::vector<Allocation> solve_heterogeneous_time_driven(const Population& population,
                                                        std::span<const double> lambdas, double b) {
  std::vector<Allocation> out;
  out.reserve(population.num_users());
  for (std::size_t m = 0; m < population.num_users(); ++m) {
    out.push_back(solve_profiles(population.user_profiles(m), lambdas, b,
                                 PolicyFamily::kCachingAndOverhearing));
  }
  return out;
}

OverhearOnlyPlan solve_heterogeneous(const Population& population, double b) {
  OverhearOnlyPlan plan;
  plan.sets = popular_sets(population, b);
  const std::size_t items = population.num_items();
  plan.policies.resize(population.num_users());
  for (std::size_t m = 0; m < population.num_users(); ++m) {
    plan.policies[m].reserve(items);
    for (std::size_t i = 0; i < items; ++i) {
      const DemandProfile& prof = population.profile(m, i);
      plan.policies[m].push_back(plan.sets.is_popular(m, i) && prof.recurrent()
                                     ? overhear_only(prof.s)
                                     : never_cache());
    }
  }
  return plan;
}

}  // namespace edgecache
