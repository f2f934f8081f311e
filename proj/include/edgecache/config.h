#ifndef EDGECACHE_CONFIG_H_
#define EDGECACHE_CONFIG_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "edgecache/demand.h"
#include "edgecache/optimizer.h"
#include "edgecache/policy.h"
#include "edgecache/simulator.h"

namespace edgecache {

using Json = nlohmann::ordered_json;

// Numbers: +inf is written as the string "inf".
Json number_json(double v);
double read_number(const Json& j, const std::string& where);

// Strict reader for one JSON object: every key must be consumed before
// finish(), otherwise ConfigError names the unknown field.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string where);

  bool has(const std::string& key) const;
  const Json& raw(const std::string& key);
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  std::size_t count(const std::string& key, std::size_t fallback);
  std::uint64_t seed(const std::string& key, std::uint64_t fallback);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  std::vector<std::size_t> counts(const std::string& key, const std::vector<std::size_t>& fallback);
  void finish() const;

 private:
  std::string path(const std::string& key) const { return where_ + "." + key; }

  const Json& j_;
  std::string where_;
  std::set<std::string> used_;
};

Json policy_to_json(const ItemPolicy& policy);
ItemPolicy policy_from_json(const Json& j, const std::string& where = "policy");

Json allocation_to_json(const Allocation& allocation);

// Demand description. Exactly one of zipf / items / per_user.
struct PopulationSpec {
  enum class Kind { kZipf, kItems, kPerUser };
  Kind kind = Kind::kZipf;
  std::size_t users = 1;
  ZipfSpec zipf;
  std::vector<DemandProfile> items;
  std::vector<std::vector<DemandProfile>> per_user;

  // Homogeneous kinds only: the catalog sorted by decreasing beta.
  Catalog catalog() const;
  Population build() const;
  Json to_json() const;
  static PopulationSpec from_json(const Json& j);
};

struct OverhearingSpec {
  OverhearingMode mode = OverhearingMode::kTimeDriven;
  // Time-driven rates: lambda_i = gamma * beta_i (homogeneous), or explicit.
  bool use_gamma = true;
  double gamma = 1.0;
  std::vector<double> lambdas;

  std::vector<double> rates(const Population& population) const;
  Json to_json() const;
  static OverhearingSpec from_json(const Json& j);
};

StartMode start_from_text(const std::string& text);
std::string start_text(StartMode mode);

// Input of `edgecache simulate`.
struct SimulateSpec {
  PopulationSpec population;
  OverhearingSpec overhearing;
  // One of: a single policy for everything, one per item, one row per cache.
  enum class PolicyLayout { kAll, kItems, kCaches };
  PolicyLayout layout = PolicyLayout::kAll;
  std::vector<std::vector<ItemPolicy>> policies;
  std::vector<std::size_t> cache_of_user;
  double horizon = 2e5;
  std::uint64_t seed = 1;
  std::size_t replications = 20;
  StartMode start = StartMode::kStationary;
  double warmup = -1.0;
  CapacityMode capacity = CapacityMode::kAverage;
  double cache_size = 0.0;
  bool baselines_overhear = false;
  double broadcast_delay = 0.0;

  SimConfig build() const;
  Json to_json() const;
  static SimulateSpec from_json(const Json& j);
};

// Input of `edgecache optimize`.
struct OptimizeSpec {
  PopulationSpec population;
  OverhearingSpec overhearing;
  double cache_size = 50.0;
  // auto | time_driven | event_driven | heterogeneous | caching_only | overhearing_only
  std::string solver = "auto";
  double estimation_horizon = 1e4;
  std::uint64_t seed = 1;

  Json to_json() const;
  static OptimizeSpec from_json(const Json& j);
};

Json parse_json_text(const std::string& text, const std::string& where);
Json load_json_file(const std::string& path);
// Stable serialization used for every emitted document.
std::string dump(const Json& j);

}  // namespace edgecache

#endif  // EDGECACHE_CONFIG_H_
