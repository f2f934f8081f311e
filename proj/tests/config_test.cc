#include <gtest/gtest.h>

#include "edgecache/config.h"
#include "edgecache/error.h"
#include "edgecache/experiments.h"

namespace edgecache {
namespace {

Json parse(const std::string& text) { return parse_json_text(text, "test"); }

TEST(Config, InfinityRoundTrip) {
  EXPECT_EQ(number_json(kInfinity), Json("inf"));
  EXPECT_EQ(read_number(Json("inf"), "x"), kInfinity);
  EXPECT_EQ(read_number(Json(2.5), "x"), 2.5);
  EXPECT_THROW(read_number(Json("many"), "x"), ConfigError);
}

TEST(Config, PolicyRoundTripForEveryVariant) {
  const std::vector<ItemPolicy> all{CoPolicy{PolicyParams{1, kInfinity}}, mixture(0.3, {0, 1}, {kInfinity, kInfinity}),
                                    CacheOnlyPolicy{2.0}, OverhearOnlyPolicy{0.5}, LruPolicy{}, LfuPolicy{}};
  for (const auto& p : all) EXPECT_EQ(policy_from_json(policy_to_json(p)), p) << describe(p);
}

TEST(Config, RejectsUnknownFieldsAndBadPolicies) {
  EXPECT_THROW(Fig2Spec::from_json(parse(R"({"users": [1, 2], "userz": 3})")), ConfigError);
  EXPECT_THROW(policy_from_json(parse(R"({"type": "co", "tau": 2, "omega": 1})")), ConfigError);
  EXPECT_THROW(policy_from_json(parse(R"({"type": "fifo"})")), ConfigError);
  EXPECT_THROW(parse("{not json"), ConfigError);
}

TEST(Config, SweepSpecsRoundTrip) {
  const Fig2Spec f = Fig2Spec::from_json(parse(R"({"users": [1, 5], "replications": 3, "seed": 9})"));
  EXPECT_EQ(f.users, (std::vector<std::size_t>{1, 5}));
  EXPECT_EQ(dump(Fig2Spec::from_json(f.to_json()).to_json()), dump(f.to_json()));
  const Exp1Spec e1 = Exp1Spec::from_json(parse(R"({"gammas": [0.5], "n": 20})"));
  EXPECT_EQ(dump(Exp1Spec::from_json(e1.to_json()).to_json()), dump(e1.to_json()));
  const Exp2Spec e2 = Exp2Spec::from_json(parse(R"({"caches": [3], "roster": ["pi_E", "lru"]})"));
  EXPECT_EQ(dump(Exp2Spec::from_json(e2.to_json()).to_json()), dump(e2.to_json()));
  EXPECT_THROW(Exp2Spec::from_json(parse(R"({"roster": ["magic"]})")), ConfigError);
  EXPECT_THROW(Exp1Spec::from_json(parse(R"({"replications": 1})")), ConfigError);
}

TEST(Config, SimulateSpecRoundTrip) {
  const Json j = parse(R"({
    "population": {"users": 3, "items": [{"s": 1, "beta": 1}, {"s": 2, "beta": 0.5}]},
    "overhearing": {"mode": "event_driven"},
    "policies": {"items": [{"type": "overhearing_only", "omega": 1}, {"type": "caching_only", "tau": "inf"}]},
    "horizon": 100, "replications": 2, "seed": 4})");
  const SimulateSpec spec = SimulateSpec::from_json(j);
  EXPECT_EQ(spec.population.users, 3u);
  EXPECT_EQ(dump(SimulateSpec::from_json(spec.to_json()).to_json()), dump(spec.to_json()));
  const SimConfig cfg = spec.build();
  EXPECT_EQ(cfg.num_caches(), 3u);
  EXPECT_EQ(cfg.mode, OverhearingMode::kEventDriven);
}

TEST(Config, SimulateRejectsWrongPolicyCount) {
  EXPECT_THROW(SimulateSpec::from_json(parse(R"({
    "population": {"users": 1, "items": [{"s": 1, "beta": 1}, {"s": 2, "beta": 0.5}]},
    "policies": {"items": [{"type": "lru"}]}})")),
               ConfigError);
}

TEST(Config, ZipfPopulation) {
  const PopulationSpec p = PopulationSpec::from_json(
      parse(R"({"users": 2, "zipf": {"n": 10, "exponent": 0.8, "s_rule": "inverse_beta"}})"));
  const Population pop = p.build();
  EXPECT_EQ(pop.num_users(), 2u);
  EXPECT_EQ(pop.num_items(), 10u);
  EXPECT_THROW(PopulationSpec::from_json(parse(R"({"users": 2})")), ConfigError);
}

TEST(Optimize, FullBudgetAndDeterministicOutput) {
  const OptimizeSpec spec = OptimizeSpec::from_json(parse(R"({
    "population": {"users": 1, "zipf": {"n": 8, "exponent": 0.8, "s_rule": "inverse_beta"}},
    "overhearing": {"mode": "time_driven", "gamma": 1},
    "cache_size": 8})"));
  const Json out = run_optimize(spec);
  EXPECT_NEAR(out["objective"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(dump(out), dump(run_optimize(OptimizeSpec::from_json(out["config"]))));
  EXPECT_NO_THROW(SimulateSpec::from_json(out["simulate"]));
}

TEST(ResultTable, CsvLayoutAndValidity) {
  ResultTable t;
  t.name = "x";
  ResultRow r;
  r.sweep = "gamma";
  r.value = 0.5;
  r.policy = "lru";
  r.hit_ratio = Estimate{0.1234567, 0.001, 2};
  t.rows.push_back(r);
  EXPECT_EQ(t.to_csv(),
            "sweep,value,policy,mean_hit_ratio,stderr,analytic_hit_ratio,h_upper\n"
            "gamma,0.5,lru,0.123457,0.001,,\n");
  EXPECT_TRUE(t.rows_valid());
  t.rows[0].hit_ratio.mean = 1.5;
  EXPECT_FALSE(t.rows_valid());
}

}  // namespace
}  // namespace edgecache

namespace edgecache {
namespace {

TEST(Config, ItemsMustBeListedByDecreasingBeta) {
  EXPECT_THROW(PopulationSpec::from_json(parse_json_text(
                   R"({"users": 1, "items": [{"s": 1, "beta": 0.5}, {"s": 1, "beta": 2}]})", "t")),
               ConfigError);
}

}  // namespace
}  // namespace edgecache

namespace edgecache {
namespace {

TEST(Optimize, EmittedPoliciesReproduceObjectiveInSimulation) {
  const OptimizeSpec spec = OptimizeSpec::from_json(parse_json_text(R"({
    "population": {"users": 1, "zipf": {"n": 5, "exponent": 0.8, "s_rule": "inverse_beta"}},
    "overhearing": {"mode": "time_driven", "gamma": 1}, "cache_size": 2})", "t"));
  const Json out = run_optimize(spec);
  Json sim = out["simulate"];
  sim["horizon"] = 2e4;
  sim["replications"] = 10;
  const SimulationReport report = run_simulate(SimulateSpec::from_json(sim));
  const double mean = report.summary["overall_hit_ratio"]["mean"].get<double>();
  const double se = report.summary["overall_hit_ratio"]["stderr"].get<double>();
  EXPECT_NEAR(mean, out["objective"].get<double>(), 3 * se);
}

}  // namespace
}  // namespace edgecache
