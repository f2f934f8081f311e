#include "edgecache/experiments.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "edgecache/analytics.h"
#include "edgecache/error.h"

namespace edgecache {
namespace {

Json estimate_json(const Estimate& e) {
  Json j;
  j["mean"] = e.mean;
  if (e.has_stderr()) j["stderr"] = e.stderr_mean; else j["stderr"] = nullptr;
  return j;
}

void require_replications(std::size_t reps, const std::string& where) {
  if (reps < 2) throw ConfigError(where + ".replications: at least 2 are needed for a standard error");
}

void require_positive(const std::vector<double>& v, const std::string& where) {
  if (v.empty()) throw ConfigError(where + ": sweep values must be nonempty");
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(where + ": values must be positive and finite");
  }
}

void require_positive(const std::vector<std::size_t>& v, const std::string& where) {
  if (v.empty()) throw ConfigError(where + ": sweep values must be nonempty");
  for (std::size_t x : v) {
    if (x == 0) throw ConfigError(where + ": values must be positive");
  }
}

std::vector<ItemPolicy> uniform_row(std::size_t n, const ItemPolicy& p) {
  return std::vector<ItemPolicy>(n, p);
}

Estimate simulate_row(const Catalog& catalog, std::size_t caches, std::vector<ItemPolicy> row,
                      OverhearingMode mode, const std::vector<double>& lambdas, double horizon,
                      std::uint64_t seed, double cache_size, std::size_t reps) {
  const SimConfig cfg = homogeneous_sim(catalog, caches, std::move(row), mode, lambdas, horizon, seed, cache_size);
  return replicate(cfg, reps).overall_hit_ratio;
}

}  // namespace

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string ResultTable::to_csv() const {
  std::string out = "sweep,value,policy,mean_hit_ratio,stderr,analytic_hit_ratio,h_upper\n";
  for (const ResultRow& r : rows) {
    out += r.sweep + "," + csv_number(r.value) + "," + r.policy + "," + csv_number(r.hit_ratio.mean) + "," +
           csv_number(r.hit_ratio.stderr_mean) + "," + (r.analytic ? csv_number(*r.analytic) : "") + "," +
           (r.h_upper ? csv_number(*r.h_upper) : "") + "\n";
  }
  return out;
}

Json ResultTable::to_json() const {
  Json j;
  j["command"] = name;
  j["config"] = config;
  Json rs = Json::array();
  for (const ResultRow& r : rows) {
    Json row;
    row["sweep"] = r.sweep;
    row["value"] = r.value;
    row["policy"] = r.policy;
    row["hit_ratio"] = estimate_json(r.hit_ratio);
    if (r.analytic) row["analytic_hit_ratio"] = *r.analytic; else row["analytic_hit_ratio"] = nullptr;
    if (r.h_upper) row["h_upper"] = *r.h_upper; else row["h_upper"] = nullptr;
    rs.push_back(row);
  }
  j["rows"] = rs;
  return j;
}

bool ResultTable::rows_valid() const {
  for (const ResultRow& r : rows) {
    const double h = r.hit_ratio.mean;
    if (!(h >= 0.0 && h <= 1.0)) return false;
    if (!(r.hit_ratio.stderr_mean >= 0.0)) return false;
    if (r.analytic && !(*r.analytic >= -1e-12 && *r.analytic <= 1.0 + 1e-12)) return false;
  }
  return true;
}

Catalog inverse_beta_catalog(std::size_t n, double exponent) {
  ZipfSpec z;
  z.n = n;
  z.exponent = exponent;
  z.s_inverse_beta = true;
  return make_zipf_catalog(z);
}

SimConfig homogeneous_sim(const Catalog& catalog, std::size_t caches, std::vector<ItemPolicy> row,
                          OverhearingMode mode, std::vector<double> lambdas, double horizon,
                          std::uint64_t seed, double cache_size) {
  SimConfig cfg;
  cfg.population = Population::homogeneous(catalog, caches);
  const bool baseline = !row.empty() && (is_lru(row.front()) || is_lfu(row.front()));
  cfg.policies.assign(caches, std::move(row));
  cfg.mode = mode;
  cfg.lambdas = lambdas.empty() ? std::vector<double>(catalog.size(), 0.0) : std::move(lambdas);
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.cache_size = cache_size;
  if (baseline) cfg.capacity = CapacityMode::kHard;
  // Event-driven caches are coupled, so the stationary start is only
  // approximate there; a short warm-up removes its transient.
  if (mode == OverhearingMode::kEventDriven) cfg.warmup = 0.1;
  return cfg;
}

EventDrivenPlan plan_event_driven(const Catalog& catalog, std::size_t caches, double b,
                                  double estimation_horizon, std::uint64_t seed) {
  EventDrivenPlan plan;
  plan.estimates = estimate_occupancies(Population::homogeneous(catalog, caches), estimation_horizon, seed);
  plan.allocation = solve_event_driven(catalog, b, plan.estimates);
  plan.overhearing_only = solve_overhearing_only_event_driven(catalog, b, plan.estimates);
  return plan;
}

// ---- fig2 ----

double Fig2Spec::horizon() const {
  double longest = 0.0;
  const double c = zipf_constant(n, exponent);
  for (std::size_t i = 1; i <= n; ++i) {
    longest = std::max(longest, s + 1.0 / (c * std::pow(static_cast<double>(i), -exponent)));
  }
  return std::max(min_horizon, horizon_factor * longest);
}

Json Fig2Spec::to_json() const {
  Json j;
  j["n"] = n;
  j["cache_size"] = cache_size;
  j["s"] = s;
  j["exponent"] = exponent;
  j["users"] = users;
  j["horizon_factor"] = horizon_factor;
  j["min_horizon"] = min_horizon;
  j["replications"] = replications;
  j["seed"] = seed;
  return j;
}

Fig2Spec Fig2Spec::from_json(const Json& j) {
  ObjectReader r(j, "fig2");
  Fig2Spec spec;
  spec.n = r.count("n", spec.n);
  spec.cache_size = r.number("cache_size", spec.cache_size);
  spec.s = r.number("s", spec.s);
  spec.exponent = r.number("exponent", spec.exponent);
  spec.users = r.counts("users", spec.users);
  spec.horizon_factor = r.number("horizon_factor", spec.horizon_factor);
  spec.min_horizon = r.number("min_horizon", spec.min_horizon);
  spec.replications = r.count("replications", spec.replications);
  spec.seed = r.seed("seed", spec.seed);
  r.finish();
  if (spec.n == 0) throw ConfigError("fig2.n: must be at least 1");
  if (!(spec.cache_size >= 1.0)) throw ConfigError("fig2.cache_size: LRU needs room for one item");
  if (!(spec.s >= 0.0) || !std::isfinite(spec.s)) throw ConfigError("fig2.s: must be finite and nonnegative");
  require_positive(spec.users, "fig2.users");
  require_replications(spec.replications, "fig2");
  if (!(spec.min_horizon > 0.0) || !(spec.horizon_factor >= 0.0)) throw ConfigError("fig2: horizons must be positive");
  return spec;
}

ResultTable run_fig2(const Fig2Spec& spec) {
  ResultTable table;
  table.name = "fig2";
  table.config = spec.to_json();
  ZipfSpec z;
  z.n = spec.n;
  z.exponent = spec.exponent;
  z.s_inverse_beta = false;
  z.s_constant = spec.s;
  const Catalog catalog = make_zipf_catalog(z);
  const double horizon = spec.horizon();
  for (std::size_t m : spec.users) {
    SimConfig cfg;
    cfg.population = Population::homogeneous(catalog, m);
    cfg.cache_of_user.assign(m, 0);  // one shared cache
    cfg.policies = {uniform_row(catalog.size(), LruPolicy{})};
    cfg.lambdas.assign(catalog.size(), 0.0);
    cfg.horizon = horizon;
    cfg.seed = spec.seed;
    cfg.capacity = CapacityMode::kHard;
    cfg.cache_size = spec.cache_size;
    ResultRow row;
    row.sweep = "users";
    row.value = static_cast<double>(m);
    row.policy = "lru";
    row.hit_ratio = replicate(cfg, spec.replications).overall_hit_ratio;
    table.rows.push_back(row);
  }
  return table;
}

// ---- Experiment 1 ----

Json Exp1Spec::to_json() const {
  Json j;
  j["n"] = n;
  j["exponent"] = exponent;
  j["cache_size"] = cache_size;
  j["gammas"] = gammas;
  j["sizes"] = sizes;
  j["size_sweep_gamma"] = size_sweep_gamma;
  j["horizon"] = horizon;
  j["replications"] = replications;
  j["seed"] = seed;
  return j;
}

Exp1Spec Exp1Spec::from_json(const Json& j) {
  ObjectReader r(j, "exp1");
  Exp1Spec spec;
  spec.n = r.count("n", spec.n);
  spec.exponent = r.number("exponent", spec.exponent);
  spec.cache_size = r.number("cache_size", spec.cache_size);
  spec.gammas = r.numbers("gammas", spec.gammas);
  spec.sizes = r.numbers("sizes", spec.sizes);
  spec.size_sweep_gamma = r.number("size_sweep_gamma", spec.size_sweep_gamma);
  spec.horizon = r.number("horizon", spec.horizon);
  spec.replications = r.count("replications", spec.replications);
  spec.seed = r.seed("seed", spec.seed);
  r.finish();
  if (spec.n == 0) throw ConfigError("exp1.n: must be at least 1");
  require_positive(spec.gammas, "exp1.gammas");
  require_positive(spec.sizes, "exp1.sizes");
  require_positive(std::vector<double>{spec.cache_size, spec.horizon}, "exp1");
  if (!(spec.size_sweep_gamma >= 0.0)) throw ConfigError("exp1.size_sweep_gamma: must be nonnegative");
  require_replications(spec.replications, "exp1");
  return spec;
}

ResultTable run_exp1(const Exp1Spec& spec) {
  ResultTable table;
  table.name = "exp1";
  table.config = spec.to_json();
  const Catalog catalog = inverse_beta_catalog(spec.n, spec.exponent);
  const std::size_t n = catalog.size();
  auto point = [&](const std::string& sweep, double value, double gamma, double b) {
    std::vector<double> lambdas(n);
    for (std::size_t i = 0; i < n; ++i) lambdas[i] = gamma * catalog[i].beta;
    const Allocation pi_t = solve_time_driven(catalog, lambdas, b);
    const BenchmarkAllocations bench = solve_benchmarks(catalog, lambdas, b);
    const double h_up = upper_bound(catalog, b).h_upper;
    struct Entry {
      std::string name;
      std::vector<ItemPolicy> row;
      std::optional<double> analytic;
    };
    const std::vector<Entry> entries{
        {"pi_T", pi_t.policies, pi_t.objective},
        {"overhearing_only", bench.overhearing_only.policies, bench.overhearing_only.objective},
        {"caching_only", bench.caching_only.policies, bench.caching_only.objective},
        {"lfu", uniform_row(n, LfuPolicy{}), std::nullopt},
        {"lru", uniform_row(n, LruPolicy{}), std::nullopt},
    };
    for (const Entry& e : entries) {
      ResultRow row;
      row.sweep = sweep;
      row.value = value;
      row.policy = e.name;
      row.hit_ratio = simulate_row(catalog, 1, e.row, OverhearingMode::kTimeDriven, lambdas, spec.horizon,
                                   spec.seed, b, spec.replications);
      row.analytic = e.analytic;
      row.h_upper = h_up;
      table.rows.push_back(row);
    }
  };
  for (double gamma : spec.gammas) point("gamma", gamma, gamma, spec.cache_size);
  for (double b : spec.sizes) point("cache_size", b, spec.size_sweep_gamma, b);
  return table;
}

// ---- Experiment 2 ----

Json Exp2Spec::to_json() const {
  Json j;
  j["n"] = n;
  j["exponent"] = exponent;
  j["cache_size"] = cache_size;
  j["caches"] = caches;
  j["sizes"] = sizes;
  j["size_sweep_caches"] = size_sweep_caches;
  j["horizon"] = horizon;
  j["replications"] = replications;
  j["estimation_horizon"] = estimation_horizon;
  j["roster"] = roster;
  j["seed"] = seed;
  return j;
}

Exp2Spec Exp2Spec::from_json(const Json& j) {
  ObjectReader r(j, "exp2");
  Exp2Spec spec;
  spec.n = r.count("n", spec.n);
  spec.exponent = r.number("exponent", spec.exponent);
  spec.cache_size = r.number("cache_size", spec.cache_size);
  spec.caches = r.counts("caches", spec.caches);
  spec.sizes = r.numbers("sizes", spec.sizes);
  spec.size_sweep_caches = r.count("size_sweep_caches", spec.size_sweep_caches);
  spec.horizon = r.number("horizon", spec.horizon);
  spec.replications = r.count("replications", spec.replications);
  spec.estimation_horizon = r.number("estimation_horizon", spec.estimation_horizon);
  if (r.has("roster")) {
    const Json& ros = r.raw("roster");
    if (!ros.is_array() || ros.empty()) throw ConfigError("exp2.roster: expected a nonempty array");
    spec.roster.clear();
    for (const Json& p : ros) {
      if (!p.is_string()) throw ConfigError("exp2.roster: expected policy names");
      spec.roster.push_back(p.get<std::string>());
    }
  }
  spec.seed = r.seed("seed", spec.seed);
  r.finish();
  if (spec.n == 0) throw ConfigError("exp2.n: must be at least 1");
  require_positive(spec.caches, "exp2.caches");
  require_positive(spec.sizes, "exp2.sizes");
  require_positive(std::vector<double>{spec.cache_size, spec.horizon, spec.estimation_horizon}, "exp2");
  if (spec.size_sweep_caches == 0) throw ConfigError("exp2.size_sweep_caches: must be positive");
  require_replications(spec.replications, "exp2");
  for (const std::string& p : spec.roster) {
    if (p != "pi_E" && p != "overhearing_only" && p != "caching_only" && p != "lfu" && p != "lru") {
      throw ConfigError("exp2.roster: unknown policy \"" + p + "\"");
    }
  }
  return spec;
}

ResultTable run_exp2(const Exp2Spec& spec) {
  ResultTable table;
  table.name = "exp2";
  table.config = spec.to_json();
  const Catalog catalog = inverse_beta_catalog(spec.n, spec.exponent);
  const std::size_t n = catalog.size();
  std::map<std::size_t, std::vector<OccupancyEstimate>> estimates;
  auto estimates_for = [&](std::size_t m) -> const std::vector<OccupancyEstimate>& {
    auto it = estimates.find(m);
    if (it == estimates.end()) {
      it = estimates
               .emplace(m, estimate_occupancies(Population::homogeneous(catalog, m), spec.estimation_horizon,
                                                spec.seed))
               .first;
    }
    return it->second;
  };
  auto point = [&](const std::string& sweep, double value, std::size_t m, double b) {
    const double h_up = upper_bound(catalog, b).h_upper;
    for (const std::string& name : spec.roster) {
      std::vector<ItemPolicy> row;
      if (name == "pi_E") {
        row = solve_event_driven(catalog, b, estimates_for(m)).policies;
      } else if (name == "overhearing_only") {
        row = solve_overhearing_only_event_driven(catalog, b, estimates_for(m)).policies;
      } else if (name == "caching_only") {
        row = solve_caching_only(catalog, b).policies;
      } else if (name == "lfu") {
        row = uniform_row(n, LfuPolicy{});
      } else {
        row = uniform_row(n, LruPolicy{});
      }
      ResultRow r;
      r.sweep = sweep;
      r.value = value;
      r.policy = name;
      r.hit_ratio = simulate_row(catalog, m, std::move(row), OverhearingMode::kEventDriven, {}, spec.horizon,
                                 spec.seed, b, spec.replications);
      r.h_upper = h_up;
      table.rows.push_back(r);
    }
  };
  for (std::size_t m : spec.caches) point("caches", static_cast<double>(m), m, spec.cache_size);
  for (double b : spec.sizes) point("cache_size", b, spec.size_sweep_caches, b);
  return table;
}

// ---- optimize / simulate ----

Json run_optimize(const OptimizeSpec& spec) {
  const Population population = spec.population.build();
  const bool event_driven = spec.overhearing.mode == OverhearingMode::kEventDriven;
  std::string solver = spec.solver;
  if (solver == "auto") {
    solver = !population.is_homogeneous() ? "heterogeneous" : event_driven ? "event_driven" : "time_driven";
  }
  if (solver == "time_driven" && event_driven) throw ConfigError("solver time_driven needs time-driven overhearing");
  if (solver == "event_driven" && !event_driven) throw ConfigError("solver event_driven needs event-driven overhearing");
  if (solver != "heterogeneous" && spec.population.kind == PopulationSpec::Kind::kPerUser) {
    throw ConfigError("solver " + solver + " needs a homogeneous population");
  }
  const double b = spec.cache_size;

  SimulateSpec sim;
  sim.population = spec.population;
  sim.overhearing = spec.overhearing;
  sim.seed = spec.seed;
  sim.cache_size = b;
  if (event_driven) sim.warmup = 0.1;

  Json out;
  out["config"] = spec.to_json();
  out["solver"] = solver;
  try {
    if (solver == "heterogeneous") {
      const std::vector<double> lambdas = spec.overhearing.rates(population);
      sim.layout = SimulateSpec::PolicyLayout::kCaches;
      if (event_driven) {
        const OverhearOnlyPlan plan = solve_heterogeneous(population, b);
        Json sets;
        sets["k"] = plan.sets.k;
        sets["popular"] = plan.sets.popular;
        out["popular_sets"] = sets;
        out["objective"] = nullptr;
        out["heterogeneous_gap_bound"] = heterogeneous_gap_bound(population, b);
        sim.policies = plan.policies;
      } else {
        const std::vector<Allocation> per_cache = solve_heterogeneous_time_driven(population, lambdas, b);
        const std::vector<double> share = user_share(population);
        double objective = 0.0;
        Json allocs = Json::array();
        for (std::size_t m = 0; m < per_cache.size(); ++m) {
          objective += share[m] * per_cache[m].objective;
          allocs.push_back(allocation_to_json(per_cache[m]));
          sim.policies.push_back(per_cache[m].policies);
        }
        out["objective"] = objective;
        out["allocations"] = allocs;
      }
    } else {
      const Catalog catalog = spec.population.catalog();
      const std::vector<double> lambdas = spec.overhearing.rates(population);
      Allocation a;
      if (solver == "time_driven") {
        a = solve_time_driven(catalog, lambdas, b);
      } else if (solver == "event_driven") {
        const auto est = estimate_occupancies(population, spec.estimation_horizon, spec.seed);
        a = solve_event_driven(catalog, b, est);
      } else if (solver == "caching_only") {
        a = solve_caching_only(catalog, b);
      } else if (event_driven) {
        const auto est = estimate_occupancies(population, spec.estimation_horizon, spec.seed);
        a = solve_overhearing_only_event_driven(catalog, b, est);
      } else {
        a = solve_benchmarks(catalog, lambdas, b).overhearing_only;
      }
      out["objective"] = a.objective;
      out["h_upper"] = upper_bound(catalog, b).h_upper;
      out["allocation"] = allocation_to_json(a);
      sim.layout = SimulateSpec::PolicyLayout::kItems;
      sim.policies = {a.policies};
    }
  } catch (const ModelError& e) {
    throw ConfigError(std::string("optimize: ") + e.what());
  }
  out["simulate"] = sim.to_json();
  return out;
}

SimulationReport run_simulate(const SimulateSpec& spec) {
  const SimConfig cfg = spec.build();
  const ReplicationResult res = replicate(cfg, spec.replications);
  SimulationReport report;
  Json& s = report.summary;
  s["config"] = spec.to_json();
  s["overall_hit_ratio"] = estimate_json(res.overall_hit_ratio);
  Json items = Json::array();
  const std::size_t n = cfg.population.num_items();
  for (std::size_t i = 0; i < n; ++i) {
    Json it;
    it["item"] = i;
    if (res.item_hit_ratio[i].samples > 0) it["hit_ratio"] = estimate_json(res.item_hit_ratio[i]);
    else it["hit_ratio"] = nullptr;
    it["occupancy"] = estimate_json(res.item_occupancy[i]);
    items.push_back(it);
  }
  s["items"] = items;

  const std::size_t caches = cfg.num_caches();
  std::string csv = "cache,item,requests,hits,misses,occupancy,overheard_stores,broadcasts\n";
  ItemCounters all;
  double all_occupancy = 0.0;
  const double reps = static_cast<double>(res.runs.size());
  for (std::size_t c = 0; c < caches; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      ItemCounters k;
      double occ = 0.0;
      for (const SimMetrics& m : res.runs) {
        const ItemCounters& x = m.at(c, i);
        k.requests += x.requests;
        k.hits += x.hits;
        k.misses += x.misses;
        k.overheard_stores += x.overheard_stores;
        k.broadcasts += x.broadcasts;
        occ += m.cache_item_occupancy(c, i) / reps;
      }
      all.requests += k.requests;
      all.hits += k.hits;
      all.misses += k.misses;
      all.overheard_stores += k.overheard_stores;
      all.broadcasts += k.broadcasts;
      all_occupancy += occ;
      csv += std::to_string(c) + "," + std::to_string(i) + "," + std::to_string(k.requests) + "," +
             std::to_string(k.hits) + "," + std::to_string(k.misses) + "," + csv_number(occ) + "," +
             std::to_string(k.overheard_stores) + "," + std::to_string(k.broadcasts) + "\n";
    }
  }
  // Aggregate row: totals, and the mean number of cached items per cache.
  csv += "all,all," + std::to_string(all.requests) + "," + std::to_string(all.hits) + "," +
         std::to_string(all.misses) + "," + csv_number(all_occupancy / static_cast<double>(caches)) + "," +
         std::to_string(all.overheard_stores) + "," + std::to_string(all.broadcasts) + "\n";
  report.csv = std::move(csv);
  return report;
}

}  // namespace edgecache
