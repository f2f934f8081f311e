#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "edgecache/config.h"
#include "edgecache/error.h"
#include "edgecache/experiments.h"
#include "edgecache/validate.h"

namespace {

using namespace edgecache;

constexpr int kOk = 0;
constexpr int kInvariantFailure = 1;
constexpr int kConfigFailure = 2;

// Longer horizons and more replications for figure sweeps.
constexpr double kPaperScaleHorizon = 5.0;
constexpr std::size_t kPaperScaleReplications = 20;

struct Options {
  std::string config;
  std::string out;
  bool paper_scale = false;
  bool quick = false;
};

Json config_or_empty(const std::string& path) { return path.empty() ? Json::object() : load_json_file(path); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

void emit(const Options& o, const std::string& name, const std::string& csv, const std::string& json) {
  if (o.out.empty()) {
    std::cout << (csv.empty() ? json : csv);
    return;
  }
  std::filesystem::create_directories(o.out);
  if (!csv.empty()) write_file(std::filesystem::path(o.out) / (name + ".csv"), csv);
  write_file(std::filesystem::path(o.out) / (name + ".json"), json);
}

int emit_table(const Options& o, const ResultTable& table) {
  emit(o, table.name, table.to_csv(), dump(table.to_json()));
  if (!table.rows_valid()) {
    std::cerr << table.name << ": result row outside [0, 1] or negative stderr\n";
    return kInvariantFailure;
  }
  return kOk;
}

int cmd_validate(const Options& o) {
  ValidateOptions v;
  v.quick = o.quick;
  const ValidationReport report = run_validation(v);
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
  }
  if (!report.passed()) {
    std::cerr << "first failure: " << report.first_failure() << "\n";
    return kInvariantFailure;
  }
  return kOk;
}

int cmd_fig2(const Options& o) {
  Fig2Spec spec = Fig2Spec::from_json(config_or_empty(o.config));
  if (o.paper_scale) {
    spec.horizon_factor *= kPaperScaleHorizon;
    spec.min_horizon *= kPaperScaleHorizon;
    spec.replications = std::max(spec.replications, kPaperScaleReplications);
  }
  return emit_table(o, run_fig2(spec));
}

int cmd_exp1(const Options& o) {
  Exp1Spec spec = Exp1Spec::from_json(config_or_empty(o.config));
  if (o.paper_scale) spec.horizon *= kPaperScaleHorizon;
  return emit_table(o, run_exp1(spec));
}

int cmd_exp2(const Options& o) {
  Exp2Spec spec = Exp2Spec::from_json(config_or_empty(o.config));
  if (o.paper_scale) spec.horizon *= kPaperScaleHorizon;
  return emit_table(o, run_exp2(spec));
}

int cmd_optimize(const Options& o) {
  const OptimizeSpec spec = OptimizeSpec::from_json(load_json_file(o.config));
  emit(o, "optimize", "", dump(run_optimize(spec)));
  return kOk;
}

int cmd_simulate(const Options& o) {
  const SimulateSpec spec = SimulateSpec::from_json(load_json_file(o.config));
  const SimulationReport report = run_simulate(spec);
  if (o.out.empty()) {
    std::cout << dump(report.summary);
  } else {
    emit(o, "simulate", report.csv, dump(report.summary));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge caching with overhearing: analysis, optimization and simulation"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Run the invariant suites");
  validate->add_flag("--quick", o.quick, "Oracle checks at 1e4 renewals");

  auto add_sweep = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "JSON document overriding defaults")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Directory for CSV and JSON output (default: CSV on stdout)");
    sub->add_flag("--paper-scale", o.paper_scale, "Longer horizons and more replications");
    return sub;
  };
  auto* fig2 = add_sweep("fig2", "LRU hit ratio vs. number of users sharing one cache");
  auto* exp1 = add_sweep("exp1", "Time-driven overhearing: pi^T vs. benchmarks");
  auto* exp2 = add_sweep("exp2", "Event-driven overhearing: pi^E vs. benchmarks and h_upper");

  auto* optimize = app.add_subcommand("optimize", "Solve for the optimal allocation");
  optimize->add_option("--config", o.config, "JSON document")->required()->check(CLI::ExistingFile);
  optimize->add_option("--out", o.out, "Directory for optimize.json (default: stdout)");

  auto* simulate = app.add_subcommand("simulate", "Simulate a policy assignment");
  simulate->add_option("--config", o.config, "JSON document")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", o.out, "Directory for simulate.json and simulate.csv (default: JSON on stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*fig2) return cmd_fig2(o);
    if (*exp1) return cmd_exp1(o);
    if (*exp2) return cmd_exp2(o);
    if (*optimize) return cmd_optimize(o);
    if (*simulate) return cmd_simulate(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const ModelError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariantFailure;
  }
  return kOk;
}
