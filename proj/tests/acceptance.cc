// One PASS/FAIL line per acceptance criterion. `acceptance --only N` runs a
// single criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "edgecache/analytics.h"
#include "edgecache/config.h"
#include "edgecache/experiments.h"
#include "edgecache/optimizer.h"
#include "edgecache/simulator.h"
#include "edgecache/validate.h"

namespace {

using namespace edgecache;

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0, double e = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d, e);
  return buf;
}

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

// ---- 1: simulated (h, r) against the closed form ----
Outcome oracle_equivalence() {
  Outcome o;
  const auto cases = random_closed_form_cases(30, kSeed);
  double worst = 0.0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const OracleComparison c = compare_with_simulation(cases[k], 1e5, 20, kSeed + k, {});
    const double z = std::max(std::abs(c.z_hit()), std::abs(c.z_occupancy()));
    worst = std::max(worst, z);
    if (z > 3.0) {
      fail(o, fmt("case %.0f: s=%.4g beta=%.4g tau=%.4g omega=%.4g", k, cases[k].profile.s, cases[k].profile.beta,
                  cases[k].params.tau, cases[k].params.omega) +
                  fmt(" |z|=%.3g", z));
    }
  }
  if (o.pass) o.detail = fmt("30 cases, 1e5 renewals each, max |z| = %.3g", worst);
  return o;
}

Outcome from_check(const CheckResult& c, const std::string& ok) {
  return Outcome{c.passed, c.passed ? ok : c.name + ": " + c.detail};
}

// ---- 2 ----
Outcome continuity_and_separability() {
  const CheckResult a = check_region_continuity(evaluate_co, kSeed, 1000);
  if (!a.passed) return from_check(a, "");
  return from_check(check_separability(evaluate_co, kSeed + 1, 1000),
                    "1000 boundary trials and 1000 separability points within 1e-12");
}

// ---- 3 ----
Outcome dominance() {
  return from_check(check_curve_dominance(evaluate_co, kSeed, 5), "5 items x 64 x 64 grid below the curve + 1e-9");
}

// ---- 4 ----
Outcome solver_oracle() {
  return from_check(check_solver_oracle(kSeed, 100), "100 instances, both modes, within 1e-3 of the grid oracle");
}

// ---- 5 ----
Outcome fig2() {
  Outcome o;
  if (std::abs(zipf_constant(1000, 1.4) - 0.3392) > 1e-4) fail(o, fmt("c = %.6f", zipf_constant(1000, 1.4)));
  const ResultTable t = run_fig2(Fig2Spec{});
  std::string means;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    means += fmt(k ? ", %.4g" : "%.4g", t.rows[k].hit_ratio.mean);
    if (k > 0 && !(t.rows[k].hit_ratio.mean > t.rows[k - 1].hit_ratio.mean)) fail(o, "not increasing in users");
  }
  if (!(t.rows.front().hit_ratio.mean < 0.01)) fail(o, "single-user hit ratio not below 0.01");
  o.detail = (o.pass ? "" : o.detail + "; ") + "users 1/10/100/1000: " + means;
  return o;
}

// ---- 6 ----
Outcome exp1() {
  Outcome o;
  const ResultTable t = run_exp1(Exp1Spec{});
  std::map<std::pair<std::string, double>, std::map<std::string, Estimate>> points;
  for (const auto& r : t.rows) points[{r.sweep, r.value}][r.policy] = r.hit_ratio;
  double worst = kInfinity;
  for (const auto& [key, policies] : points) {
    const Estimate& best = policies.at("pi_T");
    for (const auto& [name, e] : policies) {
      if (name == "pi_T") continue;
      const double se = std::hypot(best.stderr_mean, e.stderr_mean);
      worst = std::min(worst, best.mean - e.mean + 2.0 * se);
      if (best.mean < e.mean - 2.0 * se) {
        fail(o, key.first + fmt("=%.4g: ", key.second) + name + fmt(" %.5f above pi_T %.5f", e.mean, best.mean));
      }
    }
  }
  const auto& g5 = points.at({"gamma", 5.0});
  const double gap5 = g5.at("pi_T").mean - g5.at("overhearing_only").mean;
  if (std::abs(gap5) > 0.02) fail(o, fmt("overhearing-only %.4f from pi_T at gamma=5", gap5));
  if (o.pass) o.detail = fmt("min margin %.4g, overhearing-only gap at gamma=5: %.4f", worst, gap5);
  return o;
}

// ---- 7-9: event-driven runs on the Experiment-2 catalog ----
constexpr std::size_t kExp2Items = 1000;
constexpr double kExp2Budget = 50.0;
constexpr double kExp2Horizon = 2e5;
constexpr std::size_t kExp2Reps = 20;

const Catalog& exp2_catalog() {
  static const Catalog c = inverse_beta_catalog(kExp2Items, 0.8);
  return c;
}

// All caches overhear every item with omega = s_i.
const ReplicationResult& overhear_all(std::size_t caches) {
  static std::map<std::size_t, ReplicationResult> memo;
  auto it = memo.find(caches);
  if (it != memo.end()) return it->second;
  const Catalog& c = exp2_catalog();
  std::vector<ItemPolicy> row;
  for (std::size_t i = 0; i < c.size(); ++i) row.push_back(overhear_only(c[i].s));
  const SimConfig cfg = homogeneous_sim(c, caches, row, OverhearingMode::kEventDriven, {}, kExp2Horizon, 1, kExp2Budget);
  return memo.emplace(caches, replicate(cfg, kExp2Reps)).first->second;
}

Outcome linear_ratio() {
  Outcome o;
  const Catalog& c = exp2_catalog();
  const ReplicationResult& res = overhear_all(50);
  double worst = 0.0, signed_sum = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    std::vector<double> ratios;
    for (const auto& m : res.runs) {
      const auto h = m.item_hit_ratio(i);
      const double r = m.item_occupancy(i);
      if (h && r > 0.0) ratios.push_back(*h / r);
    }
    const Estimate e = summarize(ratios);
    const double want = c[i].overhear_slope();
    const double z = std::abs(e.mean - want) / e.stderr_mean;
    signed_sum += (e.mean - want) / e.stderr_mean;
    worst = std::max(worst, z);
    if (!(z <= 3.0)) fail(o, fmt("item %.0f: h/r = %.5f +- %.2g, expected %.4g", i, e.mean, e.stderr_mean, want));
  }
  if (o.pass) o.detail = fmt("top 20 items, max |z| = %.3g, mean z = %.3g", worst, signed_sum / 20.0);
  return o;
}

Outcome convergence() {
  Outcome o;
  const Catalog& c = exp2_catalog();
  const double h_up = upper_bound(c, kExp2Budget).h_upper;
  std::string gaps;
  double prev = kInfinity;
  for (std::size_t m : {10, 25, 50, 100}) {
    const EventDrivenPlan plan = plan_event_driven(c, m, kExp2Budget, 1e4, 1);
    const SimConfig cfg = homogeneous_sim(c, m, plan.allocation.policies, OverhearingMode::kEventDriven, {},
                                          kExp2Horizon, 1, kExp2Budget);
    const Estimate h = replicate(cfg, kExp2Reps).overall_hit_ratio;
    const double gap = h_up - h.mean;
    const double bound = homogeneous_gap_bound(c, kExp2Budget, m);
    gaps += fmt(gaps.empty() ? "M=%.0f gap %.4f (bound %.3f)" : ", M=%.0f gap %.4f (bound %.3f)",
                static_cast<double>(m), gap, bound);
    if (gap > bound + 3.0 * h.stderr_mean) fail(o, fmt("M=%.0f gap %.4f above bound %.4f", m, gap, bound));
    if (gap > prev) fail(o, fmt("gap grows at M=%.0f", m));
    prev = gap;
  }
  o.detail = (o.pass ? "" : o.detail + "; ") + gaps;
  return o;
}

Outcome miss_bound() {
  Outcome o;
  const Catalog& c = exp2_catalog();
  const std::size_t roster = std::min(upper_bound(c, kExp2Budget).k + 1, c.size());
  double slack = kInfinity;
  for (std::size_t m : {10, 25, 50, 100}) {
    const ReplicationResult& res = overhear_all(m);
    for (std::size_t i = 0; i < roster; ++i) {
      std::vector<double> miss;
      for (const auto& run : res.runs) {
        if (const auto h = run.item_hit_ratio(i)) miss.push_back(1.0 - *h);
      }
      const Estimate e = summarize(miss);
      const double bound = 2.0 * std::sqrt(c[i].overhear_slope() / static_cast<double>(m));
      slack = std::min(slack, bound + 3.0 * e.stderr_mean - e.mean);
      if (e.mean > bound + 3.0 * e.stderr_mean) fail(o, fmt("M=%.0f item %.0f: miss %.4f above %.4f", m, i, e.mean, bound));
    }
  }
  if (o.pass) o.detail = fmt("items 1..%.0f at M=10/25/50/100, min slack %.4f", static_cast<double>(roster), slack);
  return o;
}

// ---- 10 ----
Outcome heterogeneous() {
  Outcome o;
  // Two users with reversed preferences; need_i = 1 / (beta s + 1).
  // User A: items 0..3 with beta 4, 2, 1, 0.5 and needs 1/2, 1/3, 1/2, 1/2.
  // User B: items 3..0 with beta 4, 2, 1, 0.5 and needs 1/5, 1/5, 1/2, 1.
  const std::vector<DemandProfile> a{DemandProfile::make(0.25, 4), DemandProfile::make(1, 2), DemandProfile::make(1, 1),
                                     DemandProfile::make(2, 0.5)};
  const std::vector<DemandProfile> b{DemandProfile::make(0, 0.5), DemandProfile::make(1, 1), DemandProfile::make(2, 2),
                                     DemandProfile::make(1, 4)};
  const double budget = 1.0;
  const PopularSets sets = popular_sets(Population::heterogeneous({a, b}), budget);
  // With b = 1: A fits 1/2 + 1/3, B fits 1/5 + 1/5 + 1/2.
  if (sets.k != std::vector<std::size_t>{2, 3}) fail(o, "K differs from {2, 3}");
  if (sets.popular[0] != std::vector<std::size_t>{0, 1}) fail(o, "user A popular set differs from {0, 1}");
  if (sets.popular[1] != std::vector<std::size_t>{3, 2, 1}) fail(o, "user B popular set differs from {3, 2, 1}");

  // Homogeneous reduction: 50 caches, one user each, alternating types.
  std::vector<std::vector<DemandProfile>> users;
  for (std::size_t m = 0; m < 50; ++m) users.push_back(m % 2 ? b : a);
  const Population pop = Population::heterogeneous(users);
  const OverhearOnlyPlan plan = solve_heterogeneous(pop, budget);
  SimConfig cfg;
  cfg.population = pop;
  cfg.policies = plan.policies;
  cfg.mode = OverhearingMode::kEventDriven;
  cfg.horizon = 2e4;
  cfg.seed = 1;
  cfg.warmup = 0.1;
  const Estimate h = replicate(cfg, 20).overall_hit_ratio;
  const std::vector<double> share = user_share(pop);
  double proxy = 0.0;
  for (std::size_t m = 0; m < users.size(); ++m) proxy += share[m] * upper_bound(Catalog(users[m]), budget).h_upper;
  const double slack = heterogeneous_gap_bound(pop, budget);
  const double floor = proxy - slack - 3.0 * h.stderr_mean;
  if (h.mean < floor) fail(o, fmt("hit %.4f below %.4f", h.mean, floor));
  o.detail = (o.pass ? "" : o.detail + "; ") +
             fmt("K = {2, 3}; hit %.4f, h_upper proxy %.4f, allowed gap %.4f", h.mean, proxy, slack);
  return o;
}

// ---- 11: CLI re-runs from the echoed config ----
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(EDGECACHE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// Runs `command` from `input`, then again from the config echoed in
// <name>.json, and compares every output file byte for byte.
void rerun_identical(Outcome& o, const fs::path& dir, const std::string& command, const std::string& name,
                     const std::string& input, const std::vector<std::string>& files) {
  const fs::path first = dir / (name + "_1"), second = dir / (name + "_2");
  write(dir / (name + "_in.json"), input);
  if (cli(command + " --config " + (dir / (name + "_in.json")).string() + " --out " + first.string()) != 0) {
    return fail(o, name + ": first run failed");
  }
  const Json echoed = parse_json_text(slurp(first / (name + ".json")), name)["config"];
  write(dir / (name + "_echo.json"), dump(echoed));
  if (cli(command + " --config " + (dir / (name + "_echo.json")).string() + " --out " + second.string(),
          "EDGECACHE_THREADS=1") != 0) {
    return fail(o, name + ": re-run failed");
  }
  for (const std::string& f : files) {
    const std::string x = slurp(first / f), y = slurp(second / f);
    if (x.empty() || x != y) fail(o, name + ": " + f + " differs on re-run");
  }
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("edgecache_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  rerun_identical(o, dir, "fig2", "fig2",
                  R"({"n": 50, "users": [1, 4], "min_horizon": 3000, "horizon_factor": 0, "replications": 3})",
                  {"fig2.csv", "fig2.json"});
  rerun_identical(o, dir, "exp1", "exp1",
                  R"({"n": 40, "gammas": [0.5, 2], "sizes": [5], "horizon": 3000, "replications": 3})",
                  {"exp1.csv", "exp1.json"});
  rerun_identical(o, dir, "exp2", "exp2",
                  R"({"n": 40, "caches": [3, 6], "sizes": [5], "size_sweep_caches": 3, "horizon": 2000,
                      "replications": 3, "estimation_horizon": 500})",
                  {"exp2.csv", "exp2.json"});
  rerun_identical(o, dir, "optimize", "optimize",
                  R"({"population": {"users": 4, "zipf": {"n": 30, "exponent": 0.8, "s_rule": "inverse_beta"}},
                      "overhearing": {"mode": "event_driven"}, "cache_size": 5, "estimation_horizon": 500,
                      "seed": 3})",
                  {"optimize.json"});
  if (o.pass) {
    // The policies emitted by optimize, simulated twice.
    Json sim = parse_json_text(slurp(dir / "optimize_1" / "optimize.json"), "optimize")["simulate"];
    sim["horizon"] = 3000;
    sim["replications"] = 3;
    rerun_identical(o, dir, "simulate", "simulate", dump(sim), {"simulate.csv", "simulate.json"});
  }
  const std::string v1 = (dir / "v1.txt").string(), v2 = (dir / "v2.txt").string();
  if (std::system((std::string(EDGECACHE_CLI) + " validate --quick > " + v1 + " 2>&1").c_str()) != 0 ||
      std::system(("EDGECACHE_THREADS=1 " + std::string(EDGECACHE_CLI) + " validate --quick > " + v2 + " 2>&1").c_str()) != 0) {
    fail(o, "validate --quick failed");
  }
  if (slurp(v1).empty() || slurp(v1) != slurp(v2)) fail(o, "validate output differs on re-run");
  if (cli("simulate --config " + (dir / "exp1_in.json").string()) != 2) fail(o, "bad simulate config did not exit 2");
  if (o.pass) o.detail = "fig2, exp1, exp2, optimize, simulate, validate reproduced byte for byte";
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int k = 1; k + 1 < argc; ++k) {
    if (std::string(argv[k]) == "--only") only = std::atoi(argv[k + 1]);
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed-form oracle equivalence", oracle_equivalence},
      {"region continuity and separability", continuity_and_separability},
      {"curve dominance", dominance},
      {"solver-oracle agreement", solver_oracle},
      {"single-cache LRU vs. number of users", fig2},
      {"time-driven dominance of pi_T", exp1},
      {"linear hit/occupancy ratio under overhearing", linear_ratio},
      {"event-driven convergence to h_upper", convergence},
      {"per-item miss bound", miss_bound},
      {"heterogeneous popular sets and hit ratio", heterogeneous},
      {"determinism from echoed config", determinism},
  };
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (only && only != id) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s: %s (%.1f s) %s\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first, secs,
                o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
