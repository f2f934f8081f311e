#ifndef EDGECACHE_EXPERIMENTS_H_
#define EDGECACHE_EXPERIMENTS_H_

#include <optional>
#include <string>
#include <vector>

#include "edgecache/config.h"
#include "edgecache/optimizer.h"
#include "edgecache/simulator.h"

namespace edgecache {

struct ResultRow {
  std::string sweep;  // name of the swept parameter
  double value = 0.0;
  std::string policy;
  Estimate hit_ratio;
  std::optional<double> analytic;
  std::optional<double> h_upper;
};

struct ResultTable {
  std::string name;
  Json config;  // fully resolved input, seed included
  std::vector<ResultRow> rows;

  // sweep,value,policy,mean_hit_ratio,stderr,analytic_hit_ratio,h_upper
  std::string to_csv() const;
  Json to_json() const;
  // Hit ratios in [0, 1] and stderr >= 0 on every row.
  bool rows_valid() const;
};

// CSV number with 6 significant digits.
std::string csv_number(double v);

// N items with beta_i = c i^-exponent (c normalizing) and s_i = 1/beta_i.
Catalog inverse_beta_catalog(std::size_t n, double exponent);

// M caches, one user each, all running `row`. LRU/LFU rows get a hard
// capacity of `cache_size`.
SimConfig homogeneous_sim(const Catalog& catalog, std::size_t caches, std::vector<ItemPolicy> row,
                          OverhearingMode mode, std::vector<double> lambdas, double horizon,
                          std::uint64_t seed, double cache_size);

// Event-driven pi^E for M homogeneous caches: estimation phase, then the
// allocation over the estimated curves.
struct EventDrivenPlan {
  std::vector<OccupancyEstimate> estimates;
  Allocation allocation;
  Allocation overhearing_only;
};
EventDrivenPlan plan_event_driven(const Catalog& catalog, std::size_t caches, double b,
                                  double estimation_horizon, std::uint64_t seed);

struct Fig2Spec {
  std::size_t n = 1000;
  double cache_size = 50.0;
  double s = 5000.0;
  double exponent = 1.4;
  std::vector<std::size_t> users{1, 10, 100, 1000};
  // Horizon = max(min_horizon, horizon_factor * max_i E[X_i]).
  double horizon_factor = 200.0;
  double min_horizon = 2e5;
  std::size_t replications = 2;
  std::uint64_t seed = 1;

  double horizon() const;
  Json to_json() const;
  static Fig2Spec from_json(const Json& j);
};

struct Exp1Spec {
  std::size_t n = 1000;
  double exponent = 0.8;
  double cache_size = 50.0;
  std::vector<double> gammas{0.1, 0.5, 1.0, 2.0, 5.0};
  std::vector<double> sizes{10.0, 50.0, 100.0, 500.0, 1000.0};
  double size_sweep_gamma = 1.0;
  double horizon = 2e5;
  std::size_t replications = 20;
  std::uint64_t seed = 1;

  Json to_json() const;
  static Exp1Spec from_json(const Json& j);
};

struct Exp2Spec {
  std::size_t n = 1000;
  double exponent = 0.8;
  double cache_size = 50.0;
  std::vector<std::size_t> caches{10, 25, 50, 100};
  std::vector<double> sizes{10.0, 50.0, 100.0, 500.0, 1000.0};
  std::size_t size_sweep_caches = 50;
  double horizon = 2e5;
  std::size_t replications = 20;
  double estimation_horizon = 1e4;
  std::vector<std::string> roster{"pi_E", "overhearing_only", "caching_only", "lfu", "lru"};
  std::uint64_t seed = 1;

  Json to_json() const;
  static Exp2Spec from_json(const Json& j);
};

ResultTable run_fig2(const Fig2Spec& spec);
ResultTable run_exp1(const Exp1Spec& spec);
ResultTable run_exp2(const Exp2Spec& spec);

// `optimize`: allocation, h_upper and a ready-to-run `simulate` document.
Json run_optimize(const OptimizeSpec& spec);
// `simulate`: summary document plus the per-(cache, item) CSV.
struct SimulationReport {
  Json summary;
  std::string csv;
};
SimulationReport run_simulate(const SimulateSpec& spec);

}  // namespace edgecache

#endif  // EDGECACHE_EXPERIMENTS_H_
