#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefroute/config.hpp"
#include "beliefroute/euler_cpp.hpp"
#include "beliefroute/map_env.hpp"
#include "beliefroute/montecarlo.hpp"
#include "beliefroute/planner.hpp"
#include "beliefroute/roadmap.hpp"

namespace beliefroute {

/// Progress sink (may be empty). Messages are informational only.
using ProgressFn = std::function<void(const std::string&)>;

struct PlanResult {
  RoadmapGraph roadmap;  // k-NN graph before Eulerization
  RoadmapGraph graph;    // Eulerized
  std::vector<Circuit> candidates;
  std::vector<Circuit> retained;  // flight time below rho
  std::vector<PathScore> scores;  // one per retained circuit, same order
  RankingReport ranking;
};

/// Samples the roadmap, generates and filters candidates, scores and ranks
/// them. Pure computation; nothing is written.
PlanResult run_plan(const RunConfig& cfg, const EnvironmentMap& map,
                    const ProgressFn& progress = {});

struct TrialSet {
  std::string label;
  std::size_t circuit_index = 0;
  MeasurementMode mode = MeasurementMode::kNoisy;
  double nominal_flight_time = 0.0;  // plan steps * ts
  std::vector<TruthTrajectory> truths;
  std::vector<OnlineResult> online;
  std::vector<RunStats> stats;
  TrialAggregate aggregate;
};

/// Truth and measurement streams of run r on circuit c are seeded from
/// (cfg.seed, c, r) only, so results do not depend on thread scheduling and
/// noisy/perfect trials of one run share the same truth track.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t stream,
                         std::size_t circuit, std::size_t run);

TrialSet run_trials(const RunConfig& cfg, const EnvironmentMap& map,
                    const RoadmapGraph& graph, const Circuit& circuit,
                    const std::string& label, MeasurementMode mode,
                    std::size_t runs);

/// Plan artifacts as read back from an output directory.
struct PlanArtifact {
  RoadmapGraph graph;
  std::vector<Circuit> circuits;
  nlohmann::json ranking;
};

PlanArtifact load_plan(const std::filesystem::path& dir);

/// Resolves best|worst|second_best|second_worst|<circuit index> to a circuit
/// index and an output label. Throws UnknownSelectionError.
std::size_t resolve_selection(const PlanArtifact& plan,
                              const std::string& selection,
                              std::string* label = nullptr);

/// Writes graph.json, circuits.json, scores.csv, ranking.json,
/// pec_<label>.csv for the highlighted circuits and pec_totals.svg.
PlanResult cmd_plan(const RunConfig& cfg, const ProgressFn& progress = {});

/// Reads the plan artifacts in cfg.output_dir and runs cfg.mc_runs trials
/// of the selected circuit. Writes sim_<label>_<mode>/ (per-run CSVs,
/// summary.csv, overlay SVGs), simulation_<label>_<mode>.json and refreshes
/// aggregate_<mode>.csv.
TrialSet cmd_simulate(const RunConfig& cfg, const std::string& selection,
                      MeasurementMode mode, const ProgressFn& progress = {});

/// Consolidates the artifacts in `dir` into report.json and report.txt and
/// returns the JSON document.
nlohmann::json cmd_report(const std::filesystem::path& dir);

/// plan, simulate every configured selection in each mode, report.
nlohmann::json cmd_all(const RunConfig& cfg,
                       const std::vector<MeasurementMode>& modes,
                       const ProgressFn& progress = {});

}  // namespace beliefroute
