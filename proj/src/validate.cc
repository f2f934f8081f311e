#include "edgecache/validate.h"

#include <cmath>
#include <cstdio>
#include <string>

#include "edgecache/curve.h"
#include "edgecache/optimizer.h"

namespace edgecache {
namespace {

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0, double e = 0,
                double f = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, a, b, c, d, e, f);
  return buf;
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

DemandProfile random_profile(Rng& rng) {
  return DemandProfile::make(uniform(rng, 0.1, 3.0), uniform(rng, 0.2, 3.0));
}

CheckResult region_continuity(const ClosedFormModel& model, Rng& rng, std::size_t trials) {
  CheckResult r{"region continuity", true, ""};
  for (std::size_t k = 0; k < trials && r.passed; ++k) {
    const DemandProfile d = random_profile(rng);
    const double lambda = uniform(rng, 0.05, 3.0);
    const double s = d.s;
    const double above = std::nextafter(s, kInfinity);
    // omega = s seen from the tau <= omega <= s and the tau <= s <= omega sides.
    const double tau = uniform(rng, 0.0, s);
    const HitOccupancy a = model(d, lambda, PolicyParams{tau, s});
    const HitOccupancy b = model(d, lambda, PolicyParams{tau, above});
    // tau = s seen from the tau <= s <= omega and s <= tau <= omega sides.
    const double omega = s + uniform(rng, 0.0, 3.0);
    const HitOccupancy c = model(d, lambda, PolicyParams{s, omega});
    const HitOccupancy e = model(d, lambda, PolicyParams{std::min(above, omega), omega});
    const double gap = std::max({std::abs(a.hit - b.hit), std::abs(a.occupancy - b.occupancy),
                                 std::abs(c.hit - e.hit), std::abs(c.occupancy - e.occupancy)});
    if (gap > 1e-12) {
      r.passed = false;
      r.detail = fmt("s=%.6g beta=%.6g lambda=%.6g tau=%.6g omega=%.6g jump=%.3g", s, d.beta, lambda, tau,
                     omega, gap);
    }
  }
  return r;
}

CheckResult separability(const ClosedFormModel& model, Rng& rng, std::size_t trials) {
  CheckResult r{"separability", true, ""};
  for (std::size_t k = 0; k < trials && r.passed; ++k) {
    const DemandProfile d = random_profile(rng);
    const double lambda = uniform(rng, 0.05, 3.0);
    const double omega = rng.uniform() < 0.1 ? kInfinity : uniform(rng, 0.0, 2.0 * d.s + 2.0);
    const double tau = rng.uniform() < 0.1 ? 0.0 : uniform(rng, 0.0, std::min(omega, 2.0 * d.s + 2.0));
    const PolicyParams p{tau, omega};
    const HitOccupancy whole = model(d, lambda, p);
    const SeparatedParts parts = separability_check(d, lambda, p);
    const double gap =
        std::max(std::abs(whole.hit - parts.caching.hit - parts.overhearing.hit),
                 std::abs(whole.occupancy - parts.caching.occupancy - parts.overhearing.occupancy));
    if (gap > 1e-12) {
      r.passed = false;
      r.detail = fmt("s=%.6g beta=%.6g lambda=%.6g tau=%.6g omega=%.6g gap=%.3g", d.s, d.beta, lambda, tau,
                     omega, gap);
    }
  }
  return r;
}

CheckResult monotonicity(const ClosedFormModel& model, Rng& rng, std::size_t items) {
  CheckResult r{"monotonicity", true, ""};
  constexpr int kGrid = 32;
  for (std::size_t k = 0; k < items && r.passed; ++k) {
    const DemandProfile d = random_profile(rng);
    const double lambda = uniform(rng, 0.05, 3.0);
    const double top = 2.0 * d.s + 2.0;
    for (int a = 0; a <= kGrid && r.passed; ++a) {
      for (int c = a; c < kGrid && r.passed; ++c) {
        const double tau = top * a / kGrid;
        const double w0 = top * c / kGrid, w1 = top * (c + 1) / kGrid;
        const HitOccupancy x = model(d, lambda, PolicyParams{tau, w0});
        const HitOccupancy y = model(d, lambda, PolicyParams{tau, w1});
        if (y.hit > x.hit + 1e-12 || y.occupancy > x.occupancy + 1e-12) {
          r.passed = false;
          r.detail = fmt("not nonincreasing in omega: s=%.6g beta=%.6g tau=%.6g omega=%.6g", d.s, d.beta, tau, w0);
        }
        if (c > a) {
          const double t1 = top * (a + 1) / kGrid;
          if (t1 <= w0) {
            const HitOccupancy z = model(d, lambda, PolicyParams{t1, w0});
            if (z.hit < x.hit - 1e-12 || z.occupancy < x.occupancy - 1e-12) {
              r.passed = false;
              r.detail = fmt("not nondecreasing in tau: s=%.6g beta=%.6g tau=%.6g omega=%.6g", d.s, d.beta, tau, w0);
            }
          }
        }
      }
    }
  }
  return r;
}

CheckResult dominance(const ClosedFormModel& model, Rng& rng, std::size_t items) {
  CheckResult r{"curve dominance", true, ""};
  constexpr int kGrid = 64;
  for (std::size_t k = 0; k < items && r.passed; ++k) {
    const DemandProfile d = random_profile(rng);
    const double lambda = uniform(rng, 0.05, 3.0);
    const OccupancyCurve curve = OccupancyCurve::time_driven(d, lambda);
    const double top = 2.0 * d.s + 2.0;
    for (int a = 0; a < kGrid && r.passed; ++a) {
      for (int c = 0; c < kGrid && r.passed; ++c) {
        const double tau = top * a / (kGrid - 1);
        const double omega = std::max(tau, top * c / (kGrid - 1));
        const HitOccupancy v = model(d, lambda, PolicyParams{tau, omega});
        if (v.hit > curve.hit(v.occupancy) + 1e-9) {
          r.passed = false;
          r.detail = fmt("s=%.6g beta=%.6g lambda=%.6g tau=%.6g omega=%.6g above by %.3g", d.s, d.beta, lambda,
                         tau, omega, v.hit - curve.hit(v.occupancy));
        }
      }
    }
  }
  return r;
}

CheckResult concavity(Rng& rng, std::size_t items) {
  CheckResult r{"curve concavity", true, ""};
  constexpr int kGrid = 1024;
  for (std::size_t k = 0; k < items && r.passed; ++k) {
    const DemandProfile d = random_profile(rng);
    const double lambda = uniform(rng, 0.05, 3.0);
    const OccupancyCurve curves[] = {OccupancyCurve::time_driven(d, lambda),
                                     OccupancyCurve::event_driven(d, uniform(rng, 0.0, 1.0 / d.overhear_slope()))};
    for (const OccupancyCurve& c : curves) {
      double h0 = c.hit(0.0), h1 = c.hit(1.0 / kGrid);
      for (int g = 2; g <= kGrid && r.passed; ++g) {
        const double h2 = c.hit(static_cast<double>(g) / kGrid);
        if (h2 - 2.0 * h1 + h0 > 1e-8) {
          r.passed = false;
          r.detail = fmt("s=%.6g beta=%.6g lambda=%.6g r=%.6g second difference %.3g", d.s, d.beta, lambda,
                         static_cast<double>(g - 1) / kGrid, h2 - 2.0 * h1 + h0);
        }
        h0 = h1;
        h1 = h2;
      }
    }
  }
  return r;
}

CheckResult solver_oracle(Rng& rng, std::size_t instances) {
  CheckResult r{"solver-oracle agreement", true, ""};
  for (std::size_t k = 0; k < instances && r.passed; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 6.0);
    std::vector<DemandProfile> items;
    std::vector<double> lambdas, bps;
    for (std::size_t i = 0; i < n; ++i) {
      items.push_back(random_profile(rng));
      lambdas.push_back(uniform(rng, 0.05, 3.0));
      bps.push_back(uniform(rng, 0.0, 1.0 / items.back().overhear_slope()));
    }
    const std::vector<double> p = popularity(items);
    const double b = uniform(rng, 0.05, static_cast<double>(n));
    std::vector<OccupancyCurve> td, ed;
    for (std::size_t i = 0; i < n; ++i) {
      td.push_back(OccupancyCurve::time_driven(items[i], lambdas[i]));
      ed.push_back(OccupancyCurve::event_driven(items[i], bps[i]));
    }
    for (const auto* curves : {&td, &ed}) {
      const Allocation a = allocate(*curves, p, b);
      const double oracle = grid_oracle_objective(*curves, p, b);
      const bool event = curves == &ed;
      if (std::abs(a.objective - oracle) > 1e-3 || !satisfies_budget(a, b) ||
          (event && count_exceptional(a, *curves) > 1)) {
        r.passed = false;
        r.detail = fmt("n=%.0f b=%.6g solver=%.8g oracle=%.8g event_driven=%.0f", static_cast<double>(n), b,
                       a.objective, oracle, event ? 1.0 : 0.0);
      }
    }
  }
  return r;
}

CheckResult oracle_equivalence(const ClosedFormModel& model, std::uint64_t seed, bool quick) {
  CheckResult r{"closed-form oracle equivalence", true, ""};
  const std::size_t count = quick ? 6 : 30;
  const double renewals = quick ? 1e4 : 1e5;
  const auto cases = random_closed_form_cases(count, seed);
  for (std::size_t k = 0; k < cases.size() && r.passed; ++k) {
    const OracleComparison c = compare_with_simulation(cases[k], renewals, 20, seed + k, model);
    if (std::abs(c.z_hit()) > 3.0 || std::abs(c.z_occupancy()) > 3.0) {
      r.passed = false;
      r.detail = fmt("s=%.6g beta=%.6g lambda=%.6g tau=%.6g omega=%.6g z=%.3g", cases[k].profile.s,
                     cases[k].profile.beta, cases[k].lambda, cases[k].params.tau, cases[k].params.omega,
                     std::max(std::abs(c.z_hit()), std::abs(c.z_occupancy())));
    }
  }
  return r;
}

CheckResult simulator_accounting(std::uint64_t seed, bool quick) {
  CheckResult r{"simulator accounting", true, ""};
  const Catalog catalog({DemandProfile::make(1.0, 1.0), DemandProfile::make(2.0, 0.5), DemandProfile::make(0.5, 2.0)});
  SimConfig cfg;
  cfg.population = Population::homogeneous(catalog, 8);
  cfg.policies.assign(8, {overhear_only(1.0), mixture(0.3, PolicyParams{kInfinity, kInfinity}, PolicyParams{0.0, 2.0}),
                          CoPolicy{PolicyParams{0.2, 0.7}}});
  cfg.mode = OverhearingMode::kEventDriven;
  cfg.horizon = quick ? 2e3 : 2e4;
  cfg.seed = seed;
  const SimMetrics m = run(cfg);
  for (std::size_t i = 0; i < m.items && r.passed; ++i) {
    const ItemCounters t = m.item_total(i);
    if (t.hits + t.misses != t.requests) {
      r.passed = false;
      r.detail = "hits + misses != requests for item " + std::to_string(i);
    } else if (m.item_broadcasts[i] != t.misses) {
      r.passed = false;
      r.detail = "broadcasts != misses for item " + std::to_string(i);
    }
    for (std::size_t c = 0; c < m.caches && r.passed; ++c) {
      const double occ = m.at(c, i).occupancy_time;
      if (occ < 0.0 || occ > m.measured_time() * (1.0 + 1e-12)) {
        r.passed = false;
        r.detail = "occupancy outside [0, elapsed] for item " + std::to_string(i);
      }
    }
  }
  return r;
}

CheckResult upper_bound_check(std::uint64_t seed) {
  CheckResult r{"upper bound", true, ""};
  Rng rng(seed);
  for (int k = 0; k < 50 && r.passed; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 8.0);
    std::vector<DemandProfile> items;
    std::vector<double> bps;
    for (std::size_t i = 0; i < n; ++i) items.push_back(random_profile(rng));
    const Catalog catalog(items);
    for (std::size_t i = 0; i < n; ++i) bps.push_back(uniform(rng, 0.0, 1.0 / catalog[i].overhear_slope()));
    const double b = uniform(rng, 0.1, static_cast<double>(n));
    std::vector<OccupancyEstimate> est;
    for (std::size_t i = 0; i < n; ++i) est.push_back(OccupancyEstimate{i, bps[i], 1.0});
    const Allocation a = solve_event_driven(catalog, b, est);
    const double h_up = upper_bound(catalog, b).h_upper;
    if (a.objective > h_up + 1e-9) {
      r.passed = false;
      r.detail = fmt("objective %.8g above h_upper %.8g at b=%.6g", a.objective, h_up, b);
    }
  }
  return r;
}

}  // namespace

CheckResult check_region_continuity(const ClosedFormModel& model, std::uint64_t seed, std::size_t trials) {
  Rng rng(seed);
  return region_continuity(model, rng, trials);
}

CheckResult check_separability(const ClosedFormModel& model, std::uint64_t seed, std::size_t points) {
  Rng rng(seed);
  return separability(model, rng, points);
}

CheckResult check_curve_dominance(const ClosedFormModel& model, std::uint64_t seed, std::size_t items) {
  Rng rng(seed);
  return dominance(model, rng, items);
}

CheckResult check_solver_oracle(std::uint64_t seed, std::size_t instances) {
  Rng rng(seed);
  return solver_oracle(rng, instances);
}

std::vector<ClosedFormCase> random_closed_form_cases(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ClosedFormCase> out;
  for (std::size_t k = 0; k < n; ++k) {
    ClosedFormCase c;
    c.profile = DemandProfile::make(uniform(rng, 0.2, 3.0), uniform(rng, 0.3, 3.0));
    c.lambda = uniform(rng, 0.1, 3.0);
    const double s = c.profile.s;
    switch (k % 3) {
      case 0: {  // tau <= omega <= s
        const double omega = uniform(rng, 0.0, s);
        c.params = PolicyParams{uniform(rng, 0.0, omega), omega};
        break;
      }
      case 1: {  // tau <= s <= omega
        c.params = PolicyParams{uniform(rng, 0.0, s), s + uniform(rng, 0.0, 3.0)};
        break;
      }
      default: {  // s <= tau <= omega
        const double tau = s + uniform(rng, 0.0, 3.0);
        c.params = PolicyParams{tau, tau + uniform(rng, 0.0, 3.0)};
        break;
      }
    }
    out.push_back(c);
  }
  return out;
}

double OracleComparison::z_hit() const {
  return (hit.mean - theory.hit) / std::max(hit.stderr_mean, 1e-15);
}

double OracleComparison::z_occupancy() const {
  return (occupancy.mean - theory.occupancy) / std::max(occupancy.stderr_mean, 1e-15);
}

OracleComparison compare_with_simulation(const ClosedFormCase& input, double renewals, std::size_t reps,
                                         std::uint64_t seed, const ClosedFormModel& model) {
  OracleComparison out;
  out.input = input;
  out.theory = model ? model(input.profile, input.lambda, input.params)
                     : evaluate_co(input.profile, input.lambda, input.params);
  out.renewals = renewals;
  SimConfig cfg;
  cfg.population = Population::homogeneous(Catalog({input.profile}), 1);
  cfg.policies = {{CoPolicy{input.params}}};
  cfg.lambdas = {input.lambda};
  cfg.horizon = renewals * input.profile.mean_gap() / static_cast<double>(reps);
  cfg.seed = seed;
  const ReplicationResult res = replicate(cfg, reps);
  out.hit = res.item_hit_ratio[0];
  out.occupancy = res.item_occupancy[0];
  return out;
}

bool ValidationReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string ValidationReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return c.name + ": " + c.detail;
  }
  return "";
}

ValidationReport run_validation(const ValidateOptions& options) {
  const ClosedFormModel model = options.model ? options.model : ClosedFormModel(evaluate_co);
  auto seed = [&](std::uint64_t k) { return derive_seed(options.seed, {k}); };
  ValidationReport report;
  report.checks.push_back(check_region_continuity(model, seed(1), 1000));
  report.checks.push_back(check_separability(model, seed(2), 1000));
  Rng rng(seed(3));
  report.checks.push_back(monotonicity(model, rng, options.quick ? 3 : 10));
  report.checks.push_back(check_curve_dominance(model, seed(4), 5));
  report.checks.push_back(concavity(rng, options.quick ? 5 : 20));
  report.checks.push_back(check_solver_oracle(seed(5), options.quick ? 10 : 100));
  report.checks.push_back(oracle_equivalence(model, options.seed, options.quick));
  report.checks.push_back(simulator_accounting(options.seed, options.quick));
  report.checks.push_back(upper_bound_check(options.seed));
  return report;
}

}  // namespace edgecache
