// beliefroute: plan, simulate and report belief-space coverage circuits.
//
// Exit codes: 0 success, 1 unexpected failure, 2 config or usage error,
// 3 map error, 4 planner or estimation error, 5 simulation error,
// 6 missing or corrupted artifact.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beliefroute/config.hpp"
#include "beliefroute/errors.hpp"
#include "beliefroute/pipeline.hpp"

namespace br = beliefroute;

namespace {

int exit_code(br::ErrorCategory category) {
  switch (category) {
    case br::ErrorCategory::kConfig: return 2;
    case br::ErrorCategory::kMap: return 3;
    case br::ErrorCategory::kPlanner: return 4;
    case br::ErrorCategory::kEstimation: return 4;
    case br::ErrorCategory::kSimulation: return 5;
    case br::ErrorCategory::kArtifact: return 6;
  }
  return 1;
}

const char* category_name(br::ErrorCategory category) {
  switch (category) {
    case br::ErrorCategory::kConfig: return "config error";
    case br::ErrorCategory::kMap: return "map error";
    case br::ErrorCategory::kPlanner: return "planner error";
    case br::ErrorCategory::kEstimation: return "estimation error";
    case br::ErrorCategory::kSimulation: return "simulation error";
    case br::ErrorCategory::kArtifact: return "artifact error";
  }
  return "error";
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string select = "best";
  std::string mode;
  std::optional<std::size_t> runs;
  std::vector<std::string> set;
  bool quiet = false;
};

br::RunConfig resolve(const Options& o) {
  if (o.config.empty()) {
    throw br::ParseError(br::ErrorCategory::kConfig, "--config is required");
  }
  std::vector<std::string> overrides;
  if (o.seed) overrides.push_back("seed=" + std::to_string(*o.seed));
  if (o.runs) overrides.push_back("mc_runs=" + std::to_string(*o.runs));
  if (!o.mode.empty()) overrides.push_back("mode=\"" + o.mode + "\"");
  overrides.insert(overrides.end(), o.set.begin(), o.set.end());
  auto cfg = br::load_config(o.config, overrides);
  if (!o.out.empty()) cfg.output_dir = o.out;
  return cfg;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)");
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", o.out, "Output directory (overrides the config)");
  cmd->add_option("--set", o.set, "Override a config key: key.path=value")
      ->take_all();
  cmd->add_flag("-q,--quiet", o.quiet, "No progress messages");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Belief-space coverage circuit planner for a UAV/UGV team"};
  app.require_subcommand(1);
  Options o;

  auto* plan = app.add_subcommand("plan", "Build the roadmap, rank candidate circuits");
  add_common(plan, o);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trials of a planned circuit");
  add_common(simulate, o);
  simulate->add_option("--select", o.select,
                       "best, worst, second_best, second_worst or a circuit index");
  simulate->add_option("--mode", o.mode, "noisy or perfect")
      ->check(CLI::IsMember({"noisy", "perfect"}));
  simulate->add_option("--runs", o.runs, "Number of trials");

  auto* report = app.add_subcommand("report", "Consolidate artifacts into a report");
  add_common(report, o);

  auto* all = app.add_subcommand("all", "plan, simulate the configured selections, report");
  add_common(all, o);
  all->add_option("--mode", o.mode,
                  "Simulate only this mode (default: noisy and perfect)")
      ->check(CLI::IsMember({"noisy", "perfect"}));
  all->add_option("--runs", o.runs, "Number of trials per selection");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  br::ProgressFn progress;
  if (!o.quiet) {
    progress = [](const std::string& msg) { std::cerr << msg << '\n'; };
  }

  try {
    if (*report) {
      std::filesystem::path dir = o.out;
      if (dir.empty()) dir = resolve(o).output_dir;
      br::cmd_report(dir);
      if (progress) progress("report written to " + dir.string());
      return 0;
    }
    const auto cfg = resolve(o);
    if (*plan) {
      br::cmd_plan(cfg, progress);
    } else if (*simulate) {
      br::cmd_simulate(cfg, o.select, cfg.measurement.mode, progress);
    } else if (*all) {
      std::vector<br::MeasurementMode> modes{br::MeasurementMode::kNoisy,
                                             br::MeasurementMode::kPerfect};
      if (!o.mode.empty()) modes = {br::parse_mode(o.mode)};
      br::cmd_all(cfg, modes, progress);
      if (progress) progress("report written to " + cfg.output_dir.string());
    }
  } catch (const br::Error& e) {
    std::cerr << "beliefroute: " << category_name(e.category()) << ": "
              << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "beliefroute: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
