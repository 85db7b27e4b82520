#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "beliefroute/artifacts.hpp"
#include "beliefroute/pipeline.hpp"
#include "fixtures.hpp"

using namespace beliefroute;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("beliefroute_test_" + name);
  fs::remove_all(dir);
  return dir;
}

// Small and quick: 6 waypoints, 6 candidates, 2 runs.
RunConfig small_config(const fs::path& out) {
  auto cfg = load_config(brtest::default_config_path(),
                         {"nodes=6", "knn=3", "candidates=6", "mc_runs=2",
                          "rho_s=\"inf\""});
  cfg.output_dir = out;
  return cfg;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(entry.path(), dir).string()] = ss.str();
  }
  return out;
}

// Names present in only one snapshot or with different contents.
std::vector<std::string> differing_files(const std::map<std::string, std::string>& x,
                                         const std::map<std::string, std::string>& y) {
  std::vector<std::string> out;
  for (const auto& [name, bytes] : x) {
    const auto it = y.find(name);
    if (it == y.end() || it->second != bytes) out.push_back(name);
  }
  for (const auto& [name, bytes] : y) {
    if (!x.count(name)) out.push_back(name);
  }
  return out;
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

#ifdef BELIEFROUTE_CLI
int run_cli(const std::string& args) {
  const std::string cmd = std::string(BELIEFROUTE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST(Artifacts, FormatNumber) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(INFINITY), "inf");
}

TEST(Artifacts, CsvTable) {
  CsvTable t({"a", "b"});
  t.row({cell(1.5), cell(true)}).row({cell(std::size_t{3}), cell(false)});
  EXPECT_EQ(t.str(), "a,b\n1.5,1\n3,0\n");
  EXPECT_THROW(t.row({"x"}), Error);
}

TEST(Artifacts, ReadErrorsNameTheFile) {
  const auto dir = scratch("read");
  try {
    read_json(dir / "nothing.json");
    FAIL();
  } catch (const MissingArtifactError& e) {
    EXPECT_NE(std::string(e.what()).find("nothing.json"), std::string::npos);
  }
  write_text(dir / "bad.json", "{oops");
  try {
    read_json(dir / "bad.json");
    FAIL();
  } catch (const MissingArtifactError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos);
    EXPECT_EQ(e.category(), ErrorCategory::kArtifact);
  }
  fs::remove_all(dir);
}

TEST(Pipeline, TrialSeedsAreIndependentOfOrder) {
  EXPECT_EQ(trial_seed(14, kStreamTruth, 3, 2), trial_seed(14, kStreamTruth, 3, 2));
  EXPECT_NE(trial_seed(14, kStreamTruth, 3, 2), trial_seed(14, kStreamTruth, 2, 3));
  EXPECT_NE(trial_seed(14, kStreamTruth, 3, 2), trial_seed(14, kStreamMeasurements, 3, 2));
  EXPECT_EQ(trial_seed(14, kStreamTruth, 3, 2),
            derive_seed(derive_seed(14, kStreamTruth, 3), kStreamTruth, 2));
}

TEST(Pipeline, PlanSimulateReport) {
  const auto dir = scratch("flow");
  const auto cfg = small_config(dir);
  const auto plan = cmd_plan(cfg);
  ASSERT_EQ(plan.candidates.size(), 6u);
  ASSERT_EQ(plan.retained.size(), 6u);
  for (const char* f : {"config.json", "map.json", "graph.json", "circuits.json",
                        "scores.csv", "ranking.json", "pec_best.csv", "pec_worst.csv",
                        "pec_totals.svg"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(line_count(read_text(dir / "scores.csv")), 7u);

  const auto ranking = read_json(dir / "ranking.json");
  EXPECT_EQ(ranking.at("best").get<std::size_t>(), plan.ranking.best);
  EXPECT_EQ(ranking.at("worst").get<std::size_t>(), plan.ranking.worst);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : plan.scores) {
    lo = std::min(lo, s.total);
    hi = std::max(hi, s.total);
  }
  EXPECT_EQ(plan.scores[plan.ranking.best].total, lo);
  EXPECT_EQ(plan.scores[plan.ranking.worst].total, hi);
  EXPECT_EQ(line_count(read_text(dir / "pec_best.csv")),
            plan.scores[plan.ranking.best].pec_series.size() + 1);

  auto report = cmd_report(dir);
  EXPECT_FALSE(report.at("simulation").at("present").get<bool>());

  const auto set = cmd_simulate(cfg, "worst", MeasurementMode::kPerfect);
  EXPECT_EQ(set.circuit_index, plan.ranking.worst);
  EXPECT_EQ(set.stats.size(), 2u);
  const fs::path sim = dir / "sim_worst_perfect";
  for (const char* f : {"run_01.csv", "run_02.csv", "summary.csv", "overlay.svg",
                        "truth_runs.svg"}) {
    EXPECT_TRUE(fs::exists(sim / f)) << f;
  }
  EXPECT_TRUE(fs::exists(dir / "simulation_worst_perfect.json"));
  EXPECT_TRUE(fs::exists(dir / "aggregate_perfect.csv"));
  EXPECT_NEAR(set.nominal_flight_time,
              plan.candidates[plan.ranking.worst].length / 0.5, 0.02);

  report = cmd_report(dir);
  EXPECT_TRUE(report.at("simulation").at("present").get<bool>());
  EXPECT_TRUE(fs::exists(dir / "report.txt"));

  // A fresh plan clears simulation outputs that belong to the old one.
  cmd_plan(cfg);
  EXPECT_FALSE(fs::exists(sim));
  EXPECT_FALSE(fs::exists(dir / "simulation_worst_perfect.json"));
  fs::remove_all(dir);
}

TEST(Pipeline, ResolveSelection) {
  const auto dir = scratch("select");
  const auto cfg = small_config(dir);
  const auto plan = cmd_plan(cfg);
  const auto loaded = load_plan(dir);
  std::string label;
  EXPECT_EQ(resolve_selection(loaded, "best", &label), plan.ranking.best);
  EXPECT_EQ(label, "best");
  EXPECT_EQ(resolve_selection(loaded, "second_worst"), *plan.ranking.second_worst);
  EXPECT_EQ(resolve_selection(loaded, "4", &label), 4u);
  EXPECT_EQ(label, "circuit_4");
  EXPECT_THROW(resolve_selection(loaded, "middle"), UnknownSelectionError);
  EXPECT_THROW(resolve_selection(loaded, "99"), UnknownSelectionError);
  EXPECT_THROW(resolve_selection(loaded, "-1"), UnknownSelectionError);
  fs::remove_all(dir);
}

TEST(Pipeline, CorruptArtifactsAreReported) {
  const auto dir = scratch("corrupt");
  const auto cfg = small_config(dir);
  EXPECT_THROW(cmd_simulate(cfg, "best", MeasurementMode::kNoisy), MissingArtifactError);
  cmd_plan(cfg);
  write_text(dir / "graph.json", "[1, 2");
  try {
    cmd_simulate(cfg, "best", MeasurementMode::kNoisy);
    FAIL();
  } catch (const MissingArtifactError& e) {
    EXPECT_NE(std::string(e.what()).find("graph.json"), std::string::npos);
  }
  write_text(dir / "ranking.json", "not json");
  EXPECT_THROW(cmd_report(dir), MissingArtifactError);
  fs::remove_all(dir);
}

TEST(Pipeline, ZeroRunsIsASimulationError) {
  const auto map = load_map(brtest::default_map_path());
  const auto cfg = small_config(scratch("zero"));
  const auto plan = run_plan(cfg, map);
  try {
    run_trials(cfg, map, plan.graph, plan.candidates.front(), "best",
               MeasurementMode::kNoisy, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kSimulation);
  }
}

TEST(Pipeline, PerfectAndNoisyShareTruth) {
  const auto map = load_map(brtest::default_map_path());
  const auto cfg = small_config(scratch("share"));
  const auto plan = run_plan(cfg, map);
  const auto& c = plan.candidates[plan.ranking.best];
  const auto noisy = run_trials(cfg, map, plan.graph, c, "best", MeasurementMode::kNoisy, 2);
  const auto perfect =
      run_trials(cfg, map, plan.graph, c, "best", MeasurementMode::kPerfect, 2);
  for (std::size_t r = 0; r < 2; ++r) {
    ASSERT_EQ(noisy.truths[r].samples.size(), perfect.truths[r].samples.size());
    EXPECT_EQ(noisy.truths[r].samples.back().position,
              perfect.truths[r].samples.back().position);
  }
  EXPECT_NE(noisy.truths[0].samples.back().position,
            noisy.truths[1].samples.back().position);
}

TEST(Pipeline, RepeatedRunsAreByteIdentical) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  auto cfg = small_config(a);
  cmd_all(cfg, {MeasurementMode::kNoisy});
  const auto first = snapshot(a);
  ASSERT_GT(first.size(), 10u);

  // Different thread count, then a different directory. config.json records
  // both, everything else must match byte for byte.
  cfg.threads = 1;
  cmd_all(cfg, {MeasurementMode::kNoisy});
  EXPECT_EQ(differing_files(snapshot(a), first), std::vector<std::string>{"config.json"});
  cfg.output_dir = b;
  cmd_all(cfg, {MeasurementMode::kNoisy});
  EXPECT_EQ(differing_files(snapshot(b), first), std::vector<std::string>{"config.json"});
  fs::remove_all(a);
  fs::remove_all(b);
}

#ifdef BELIEFROUTE_CLI
TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  const std::string config = brtest::default_config_path().string();
  const std::string small = "--config " + config + " --out " + dir.string() +
                            " -q --set nodes=6 knn=3 candidates=4 rho_s=\\\"inf\\\"";
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("plan --bogus"), 2);
  EXPECT_EQ(run_cli("plan -q"), 2);
  EXPECT_EQ(run_cli("plan -q --config /nonexistent.json"), 2);
  EXPECT_EQ(run_cli("plan " + small + " map=/nonexistent_map.json"), 3);
  EXPECT_EQ(run_cli("plan " + small + " nodes=300 sampling_attempts=20"), 4);
  EXPECT_EQ(run_cli("simulate " + small), 6);
  EXPECT_EQ(run_cli("plan " + small), 0);
  EXPECT_EQ(run_cli("simulate " + small + " --select nowhere"), 2);
  EXPECT_EQ(run_cli("simulate " + small + " --runs 1 --mode perfect"), 0);
  EXPECT_TRUE(fs::exists(dir / "sim_best_perfect" / "run_01.csv"));
  EXPECT_EQ(run_cli("report -q --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  fs::remove_all(dir);
}
#endif
