#include "edgecache/config.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "edgecache/error.h"

namespace edgecache {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Json numbers_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

std::vector<double> read_numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(read_number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Json profile_json(const DemandProfile& p) {
  Json j;
  j["s"] = number_json(p.s);
  j["beta"] = number_json(p.beta);
  return j;
}

DemandProfile read_profile(const Json& j, const std::string& where) {
  ObjectReader r(j, where);
  const double s = r.number("s");
  const double beta = r.number("beta");
  r.finish();
  try {
    return DemandProfile::make(s, beta);
  } catch (const ModelError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<DemandProfile> read_profiles(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty array of items");
  std::vector<DemandProfile> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(read_profile(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Json profiles_json(const std::vector<DemandProfile>& v) {
  Json a = Json::array();
  for (const auto& p : v) a.push_back(profile_json(p));
  return a;
}

std::vector<ItemPolicy> read_policy_row(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty array of policies");
  std::vector<ItemPolicy> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(policy_from_json(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Json policy_row_json(const std::vector<ItemPolicy>& row) {
  Json a = Json::array();
  for (const auto& p : row) a.push_back(policy_to_json(p));
  return a;
}

}  // namespace

Json number_json(double v) {
  if (v == kInfinity) return "inf";
  return v;
}

double read_number(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string() && j.get<std::string>() == "inf") return kInfinity;
  throw ConfigError(where + ": expected a number or \"inf\"");
}

ObjectReader::ObjectReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
  if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
}

bool ObjectReader::has(const std::string& key) const { return j_.contains(key); }

const Json& ObjectReader::raw(const std::string& key) {
  if (!j_.contains(key)) throw ConfigError(path(key) + ": missing field");
  used_.insert(key);
  return j_.at(key);
}

double ObjectReader::number(const std::string& key) { return read_number(raw(key), path(key)); }

double ObjectReader::number(const std::string& key, double fallback) {
  return has(key) ? number(key) : fallback;
}

namespace {

bool is_count(const Json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

}  // namespace

std::size_t ObjectReader::count(const std::string& key, std::size_t fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!is_count(v)) throw ConfigError(path(key) + ": expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::uint64_t ObjectReader::seed(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!is_count(v)) throw ConfigError(path(key) + ": expected a nonnegative integer seed");
  return v.get<std::uint64_t>();
}

bool ObjectReader::flag(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
  return v.get<bool>();
}

std::string ObjectReader::text(const std::string& key, const std::string& fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> ObjectReader::numbers(const std::string& key, const std::vector<double>& fallback) {
  return has(key) ? read_numbers(raw(key), path(key)) : fallback;
}

std::vector<std::size_t> ObjectReader::counts(const std::string& key,
                                              const std::vector<std::size_t>& fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_array()) throw ConfigError(path(key) + ": expected an array of integers");
  std::vector<std::size_t> out;
  for (const Json& x : v) {
    if (!is_count(x)) throw ConfigError(path(key) + ": expected nonnegative integers");
    out.push_back(x.get<std::size_t>());
  }
  return out;
}

void ObjectReader::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!used_.count(it.key())) throw ConfigError(path(it.key()) + ": unknown field");
  }
}

Json policy_to_json(const ItemPolicy& policy) {
  return std::visit(
      Overloaded{
          [](const CoPolicy& p) {
            Json j;
            j["type"] = "co";
            j["tau"] = number_json(p.params.tau);
            j["omega"] = number_json(p.params.omega);
            return j;
          },
          [](const RcoPolicy& p) {
            Json j;
            j["type"] = "rco";
            j["q"] = numbers_json(p.params.q);
            j["tau"] = numbers_json(p.params.taus);
            j["omega"] = numbers_json(p.params.omegas);
            return j;
          },
          [](const CacheOnlyPolicy& p) {
            Json j;
            j["type"] = "caching_only";
            j["tau"] = number_json(p.tau);
            return j;
          },
          [](const OverhearOnlyPolicy& p) {
            Json j;
            j["type"] = "overhearing_only";
            j["omega"] = number_json(p.omega);
            return j;
          },
          [](const LruPolicy&) { return Json{{"type", "lru"}}; },
          [](const LfuPolicy&) { return Json{{"type", "lfu"}}; },
      },
      policy);
}

ItemPolicy policy_from_json(const Json& j, const std::string& where) {
  ObjectReader r(j, where);
  const std::string type = r.text("type", "");
  ItemPolicy out;
  try {
    if (type == "co") {
      const double tau = r.number("tau");
      const double omega = r.number("omega");
      out = CoPolicy{PolicyParams::make(tau, omega)};
    } else if (type == "rco") {
      auto q = read_numbers(r.raw("q"), where + ".q");
      auto taus = read_numbers(r.raw("tau"), where + ".tau");
      auto omegas = read_numbers(r.raw("omega"), where + ".omega");
      out = RcoPolicy{RandomizedParams::make(std::move(q), std::move(taus), std::move(omegas))};
    } else if (type == "caching_only") {
      out = CacheOnlyPolicy{r.number("tau")};
    } else if (type == "overhearing_only") {
      out = OverhearOnlyPolicy{r.number("omega")};
    } else if (type == "lru") {
      out = LruPolicy{};
    } else if (type == "lfu") {
      out = LfuPolicy{};
    } else {
      throw ConfigError(where + ".type: unknown policy type \"" + type + "\"");
    }
    validate(out);
  } catch (const ModelError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  r.finish();
  return out;
}

Json allocation_to_json(const Allocation& allocation) {
  Json j;
  j["objective"] = allocation.objective;
  j["r_star"] = numbers_json(allocation.r_star);
  j["policies"] = policy_row_json(allocation.policies);
  return j;
}

Catalog PopulationSpec::catalog() const {
  switch (kind) {
    case Kind::kZipf:
      return make_zipf_catalog(zipf);
    case Kind::kItems:
      return Catalog(items);
    case Kind::kPerUser:
      break;
  }
  throw ConfigError("population: a per-user population has no single catalog");
}

Population PopulationSpec::build() const {
  if (kind == Kind::kPerUser) return Population::heterogeneous(per_user);
  return Population::homogeneous(catalog(), users);
}

Json PopulationSpec::to_json() const {
  Json j;
  if (kind == Kind::kPerUser) {
    Json rows = Json::array();
    for (const auto& row : per_user) rows.push_back(profiles_json(row));
    j["per_user"] = rows;
    return j;
  }
  j["users"] = users;
  if (kind == Kind::kItems) {
    j["items"] = profiles_json(items);
    return j;
  }
  Json z;
  z["n"] = zipf.n;
  z["exponent"] = zipf.exponent;
  z["c"] = zipf.c;
  z["s_rule"] = zipf.s_inverse_beta ? "inverse_beta" : "constant";
  if (!zipf.s_inverse_beta) z["s"] = number_json(zipf.s_constant);
  j["zipf"] = z;
  return j;
}

PopulationSpec PopulationSpec::from_json(const Json& j) {
  ObjectReader r(j, "population");
  PopulationSpec spec;
  const int forms = r.has("zipf") + r.has("items") + r.has("per_user");
  if (forms != 1) throw ConfigError("population: give exactly one of zipf, items, per_user");
  if (r.has("per_user")) {
    spec.kind = Kind::kPerUser;
    const Json& rows = r.raw("per_user");
    if (!rows.is_array() || rows.empty()) throw ConfigError("population.per_user: expected a nonempty array");
    for (std::size_t m = 0; m < rows.size(); ++m) {
      spec.per_user.push_back(read_profiles(rows[m], "population.per_user[" + std::to_string(m) + "]"));
      if (spec.per_user.back().size() != spec.per_user.front().size()) {
        throw ConfigError("population.per_user: every user needs the same number of items");
      }
    }
    spec.users = spec.per_user.size();
    r.finish();
    return spec;
  }
  spec.users = r.count("users", 1);
  if (spec.users == 0) throw ConfigError("population.users: must be at least 1");
  if (r.has("items")) {
    spec.kind = Kind::kItems;
    spec.items = read_profiles(r.raw("items"), "population.items");
    // Items are indexed by decreasing beta everywhere (policies, outputs).
    for (std::size_t k = 1; k < spec.items.size(); ++k) {
      if (spec.items[k].beta > spec.items[k - 1].beta) {
        throw ConfigError("population.items: list items by nonincreasing beta (item " + std::to_string(k) + ")");
      }
    }
  } else {
    spec.kind = Kind::kZipf;
    ObjectReader z(r.raw("zipf"), "population.zipf");
    spec.zipf.n = z.count("n", 1000);
    spec.zipf.exponent = z.number("exponent", 0.8);
    spec.zipf.c = z.number("c", 0.0);
    const std::string rule = z.text("s_rule", "inverse_beta");
    if (rule == "inverse_beta") {
      spec.zipf.s_inverse_beta = true;
    } else if (rule == "constant") {
      spec.zipf.s_inverse_beta = false;
      spec.zipf.s_constant = z.number("s");
      if (!(spec.zipf.s_constant >= 0.0)) throw ConfigError("population.zipf.s: must be nonnegative");
    } else {
      throw ConfigError("population.zipf.s_rule: expected inverse_beta or constant");
    }
    if (spec.zipf.n == 0) throw ConfigError("population.zipf.n: must be at least 1");
    if (!(spec.zipf.exponent >= 0.0) || !std::isfinite(spec.zipf.exponent)) {
      throw ConfigError("population.zipf.exponent: must be finite and nonnegative");
    }
    z.finish();
  }
  r.finish();
  return spec;
}

std::vector<double> OverhearingSpec::rates(const Population& population) const {
  const std::size_t n = population.num_items();
  if (mode == OverhearingMode::kEventDriven) return std::vector<double>(n, 0.0);
  if (!use_gamma) {
    if (lambdas.size() != n) throw ConfigError("overhearing.lambdas: need one rate per item");
    return lambdas;
  }
  if (!population.is_homogeneous()) {
    throw ConfigError("overhearing.gamma: needs a homogeneous population; give lambdas instead");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = gamma * population.profile(0, i).beta;
  return out;
}

Json OverhearingSpec::to_json() const {
  Json j;
  if (mode == OverhearingMode::kEventDriven) {
    j["mode"] = "event_driven";
    return j;
  }
  j["mode"] = "time_driven";
  if (use_gamma) {
    j["gamma"] = gamma;
  } else {
    j["lambdas"] = numbers_json(lambdas);
  }
  return j;
}

OverhearingSpec OverhearingSpec::from_json(const Json& j) {
  ObjectReader r(j, "overhearing");
  OverhearingSpec spec;
  const std::string mode = r.text("mode", "time_driven");
  if (mode == "event_driven") {
    spec.mode = OverhearingMode::kEventDriven;
  } else if (mode == "time_driven") {
    spec.mode = OverhearingMode::kTimeDriven;
    if (r.has("gamma") && r.has("lambdas")) throw ConfigError("overhearing: give gamma or lambdas, not both");
    if (r.has("lambdas")) {
      spec.use_gamma = false;
      spec.lambdas = r.numbers("lambdas", {});
      for (double l : spec.lambdas) {
        if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("overhearing.lambdas: rates must be finite and nonnegative");
      }
    } else {
      spec.gamma = r.number("gamma", 1.0);
      if (!(spec.gamma >= 0.0) || !std::isfinite(spec.gamma)) throw ConfigError("overhearing.gamma: must be finite and nonnegative");
    }
  } else {
    throw ConfigError("overhearing.mode: expected time_driven or event_driven");
  }
  r.finish();
  return spec;
}

StartMode start_from_text(const std::string& text) {
  if (text == "stationary") return StartMode::kStationary;
  if (text == "cold") return StartMode::kColdStart;
  throw ConfigError("start: expected stationary or cold");
}

std::string start_text(StartMode mode) {
  return mode == StartMode::kStationary ? "stationary" : "cold";
}

SimConfig SimulateSpec::build() const {
  SimConfig cfg;
  cfg.population = population.build();
  cfg.cache_of_user = cache_of_user;
  const std::size_t caches = cfg.num_caches();
  const std::size_t items = cfg.population.num_items();
  switch (layout) {
    case PolicyLayout::kAll:
      cfg.policies.assign(caches, std::vector<ItemPolicy>(items, policies.at(0).at(0)));
      break;
    case PolicyLayout::kItems:
      if (policies.at(0).size() != items) throw ConfigError("policies.items: need one policy per item");
      cfg.policies.assign(caches, policies.at(0));
      break;
    case PolicyLayout::kCaches:
      if (policies.size() != caches) throw ConfigError("policies.caches: need one row per cache");
      for (const auto& row : policies) {
        if (row.size() != items) throw ConfigError("policies.caches: need one policy per item");
      }
      cfg.policies = policies;
      break;
  }
  cfg.mode = overhearing.mode;
  cfg.lambdas = overhearing.rates(cfg.population);
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.start = start;
  cfg.warmup = warmup;
  cfg.capacity = capacity;
  cfg.cache_size = cache_size;
  cfg.baselines_overhear = baselines_overhear;
  cfg.broadcast_delay = broadcast_delay;
  try {
    validate(cfg);
  } catch (const ModelError& e) {
    throw ConfigError(std::string("simulate: ") + e.what());
  }
  return cfg;
}

Json SimulateSpec::to_json() const {
  Json j;
  j["population"] = population.to_json();
  j["overhearing"] = overhearing.to_json();
  Json p;
  switch (layout) {
    case PolicyLayout::kAll:
      p["all"] = policy_to_json(policies.at(0).at(0));
      break;
    case PolicyLayout::kItems:
      p["items"] = policy_row_json(policies.at(0));
      break;
    case PolicyLayout::kCaches: {
      Json rows = Json::array();
      for (const auto& row : policies) rows.push_back(policy_row_json(row));
      p["caches"] = rows;
      break;
    }
  }
  j["policies"] = p;
  if (!cache_of_user.empty()) j["cache_of_user"] = cache_of_user;
  j["horizon"] = horizon;
  j["seed"] = seed;
  j["replications"] = replications;
  j["start"] = start_text(start);
  j["warmup"] = warmup;
  j["capacity"] = capacity == CapacityMode::kHard ? "hard" : "average";
  j["cache_size"] = cache_size;
  j["baselines_overhear"] = baselines_overhear;
  j["broadcast_delay"] = broadcast_delay;
  return j;
}

SimulateSpec SimulateSpec::from_json(const Json& j) {
  ObjectReader r(j, "config");
  SimulateSpec spec;
  spec.population = PopulationSpec::from_json(r.raw("population"));
  if (r.has("overhearing")) spec.overhearing = OverhearingSpec::from_json(r.raw("overhearing"));
  {
    ObjectReader p(r.raw("policies"), "policies");
    const int forms = p.has("all") + p.has("items") + p.has("caches");
    if (forms != 1) throw ConfigError("policies: give exactly one of all, items, caches");
    if (p.has("all")) {
      spec.layout = PolicyLayout::kAll;
      spec.policies = {{policy_from_json(p.raw("all"), "policies.all")}};
    } else if (p.has("items")) {
      spec.layout = PolicyLayout::kItems;
      spec.policies = {read_policy_row(p.raw("items"), "policies.items")};
    } else {
      spec.layout = PolicyLayout::kCaches;
      const Json& rows = p.raw("caches");
      if (!rows.is_array() || rows.empty()) throw ConfigError("policies.caches: expected a nonempty array");
      for (std::size_t c = 0; c < rows.size(); ++c) {
        spec.policies.push_back(read_policy_row(rows[c], "policies.caches[" + std::to_string(c) + "]"));
      }
    }
    p.finish();
  }
  spec.cache_of_user = r.counts("cache_of_user", {});
  spec.horizon = r.number("horizon", spec.horizon);
  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon)) throw ConfigError("config.horizon: must be positive and finite");
  spec.seed = r.seed("seed", spec.seed);
  spec.replications = r.count("replications", spec.replications);
  if (spec.replications == 0) throw ConfigError("config.replications: must be at least 1");
  spec.start = start_from_text(r.text("start", "stationary"));
  spec.warmup = r.number("warmup", spec.warmup);
  const std::string capacity = r.text("capacity", "average");
  if (capacity == "hard") {
    spec.capacity = CapacityMode::kHard;
  } else if (capacity != "average") {
    throw ConfigError("config.capacity: expected average or hard");
  }
  spec.cache_size = r.number("cache_size", spec.cache_size);
  spec.baselines_overhear = r.flag("baselines_overhear", spec.baselines_overhear);
  spec.broadcast_delay = r.number("broadcast_delay", spec.broadcast_delay);
  r.finish();
  spec.build();  // surfaces inconsistencies as ConfigError now
  return spec;
}

Json OptimizeSpec::to_json() const {
  Json j;
  j["population"] = population.to_json();
  j["overhearing"] = overhearing.to_json();
  j["cache_size"] = cache_size;
  j["solver"] = solver;
  j["estimation_horizon"] = estimation_horizon;
  j["seed"] = seed;
  return j;
}

OptimizeSpec OptimizeSpec::from_json(const Json& j) {
  ObjectReader r(j, "config");
  OptimizeSpec spec;
  spec.population = PopulationSpec::from_json(r.raw("population"));
  if (r.has("overhearing")) spec.overhearing = OverhearingSpec::from_json(r.raw("overhearing"));
  spec.cache_size = r.number("cache_size", spec.cache_size);
  if (!(spec.cache_size > 0.0) || !std::isfinite(spec.cache_size)) throw ConfigError("config.cache_size: must be positive and finite");
  spec.solver = r.text("solver", spec.solver);
  static const std::set<std::string> kSolvers{"auto", "time_driven", "event_driven", "heterogeneous",
                                              "caching_only", "overhearing_only"};
  if (!kSolvers.count(spec.solver)) throw ConfigError("config.solver: unknown solver \"" + spec.solver + "\"");
  spec.estimation_horizon = r.number("estimation_horizon", spec.estimation_horizon);
  if (!(spec.estimation_horizon > 0.0)) throw ConfigError("config.estimation_horizon: must be positive");
  spec.seed = r.seed("seed", spec.seed);
  r.finish();
  return spec;
}

Json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(where + ": invalid JSON: " + e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace edgecache
