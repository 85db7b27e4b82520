#include "beliefroute/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "beliefroute/artifacts.hpp"
#include "beliefroute/errors.hpp"
#include "beliefroute/parallel.hpp"
#include "beliefroute/random.hpp"
#include "beliefroute/svg.hpp"
#include "beliefroute/trajectory.hpp"

namespace beliefroute {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* const kHighlightLabels[] = {"best", "second_best", "second_worst",
                                        "worst"};

void say(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

std::optional<std::size_t> highlighted(const RankingReport& r,
                                       const std::string& label) {
  if (label == "best") return r.best;
  if (label == "worst") return r.worst;
  if (label == "second_best") return r.second_best;
  if (label == "second_worst") return r.second_worst;
  return std::nullopt;
}

json optional_index(const std::optional<std::size_t>& v) {
  return v ? json(*v) : json(nullptr);
}

const PathScore& score_of(const PlanResult& plan, std::size_t circuit) {
  for (const auto& s : plan.scores) {
    if (s.circuit_index == circuit) return s;
  }
  throw EmptyInputError("no score for circuit " + std::to_string(circuit));
}

const Circuit& circuit_of(const std::vector<Circuit>& circuits,
                          std::size_t index) {
  for (const auto& c : circuits) {
    if (c.run_index == index) return c;
  }
  throw UnknownSelectionError("no candidate circuit with index " +
                              std::to_string(index));
}

json ranking_json(const RunConfig& cfg, const PlanResult& plan) {
  std::set<std::vector<NodeId>> distinct;
  for (const auto& c : plan.candidates) distinct.insert(c.nodes);
  std::size_t below_delta = 0;
  for (const auto& s : plan.scores) below_delta += s.threshold_ok ? 1 : 0;

  json totals = json::array();
  for (const auto& s : plan.scores) {
    totals.push_back({{"circuit", s.circuit_index},
                      {"total_pec_m2", s.total},
                      {"threshold_ok", s.threshold_ok}});
  }
  json highlights = json::object();
  for (const char* label : kHighlightLabels) {
    const auto idx = highlighted(plan.ranking, label);
    if (!idx) continue;
    const auto& s = score_of(plan, *idx);
    const auto& c = circuit_of(plan.retained, *idx);
    highlights[label] = {{"circuit", *idx},
                         {"length_m", c.length},
                         {"flight_time_s", c.flight_time},
                         {"total_pec_m2", s.total},
                         {"pec_m2", series_stats_json(s.stats)},
                         {"cam_updates", s.cam_update_count},
                         {"lidar_updates", s.lidar_update_count},
                         {"skipped_updates", s.skipped_updates},
                         {"threshold_ok", s.threshold_ok}};
  }
  const auto& r = plan.ranking;
  return {
      {"seed", cfg.seed},
      {"pec_norm", to_string(cfg.pec_norm)},
      {"rho_s", std::isfinite(cfg.rho) ? json(cfg.rho) : json("inf")},
      {"delta_m2", cfg.delta},
      {"graph",
       {{"nodes", plan.graph.nodes.size()},
        {"edges_before_eulerize", plan.roadmap.edges.size()},
        {"edges_after_eulerize", plan.graph.edge_instance_count()},
        {"distinct_pairs_after_eulerize", plan.graph.edges.size()}}},
      {"candidates", plan.candidates.size()},
      {"distinct_candidates", distinct.size()},
      {"retained_below_rho", plan.retained.size()},
      {"below_delta", below_delta},
      {"best", r.best},
      {"worst", r.worst},
      {"second_best", optional_index(r.second_best)},
      {"second_worst", optional_index(r.second_worst)},
      {"degenerate", r.degenerate},
      {"worst_to_best_ratio",
       score_of(plan, r.best).total > 0.0
           ? score_of(plan, r.worst).total / score_of(plan, r.best).total
           : 0.0},
      {"ascending", r.ascending},
      {"highlighted", highlights},
      {"totals", totals},
  };
}

// Simulation and report outputs belong to the previous plan once a new plan
// is written.
void remove_stale_outputs(const fs::path& dir) {
  if (!fs::is_directory(dir)) return;
  std::vector<fs::path> stale;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if ((name.starts_with("simulation_") && name.ends_with(".json")) ||
        (name.starts_with("aggregate_") && name.ends_with(".csv")) ||
        (name.starts_with("sim_") && entry.is_directory()) ||
        name == "report.json" || name == "report.txt") {
      stale.push_back(entry.path());
    }
  }
  for (const auto& p : stale) fs::remove_all(p);
}

void refresh_aggregate(const fs::path& dir, MeasurementMode mode) {
  const std::string suffix = std::string("_") + to_string(mode) + ".json";
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("simulation_") && name.ends_with(suffix)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  CsvTable t({"path", "circuit", "statistic", "median", "mean", "rms", "mpe",
              "sigma", "x_rms", "y_rms", "z_rms", "flight_time_s",
              "lidar_updates", "cam_updates"});
  for (const auto& f : files) {
    const json doc = read_json(f);
    try {
      for (const char* stat : {"mean", "median"}) {
        const auto& s = doc.at(stat);
        t.row({doc.at("label").get<std::string>(),
               cell(doc.at("circuit").get<std::size_t>()), stat,
               cell(s.at("median_m").get<double>()),
               cell(s.at("mean_m").get<double>()),
               cell(s.at("rms_3d_m").get<double>()),
               cell(s.at("max_pos_err_m").get<double>()),
               cell(s.at("sigma_m").get<double>()),
               cell(s.at("x_rms_m").get<double>()),
               cell(s.at("y_rms_m").get<double>()),
               cell(s.at("z_rms_m").get<double>()),
               cell(s.at("flight_time_s").get<double>()),
               cell(s.at("lidar_updates").get<std::size_t>()),
               cell(s.at("cam_updates").get<std::size_t>())});
      }
    } catch (const json::exception&) {
      throw MissingArtifactError("corrupted artifact '" + f.string() + "'");
    }
  }
  write_text(dir / (std::string("aggregate_") + to_string(mode) + ".csv"),
             t.str());
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

PlanResult run_plan(const RunConfig& cfg, const EnvironmentMap& map,
                    const ProgressFn& progress) {
  PlanResult plan;
  Rng node_rng(derive_seed(cfg.seed, kStreamNodes, 0));
  SamplingOptions sampling;
  sampling.forward_bias = cfg.forward_bias;
  sampling.attempt_budget = cfg.sampling_attempts;
  const auto nodes = sample_nodes(map, cfg.nodes, sampling, node_rng);
  plan.roadmap = connect_knn(nodes, cfg.knn, map);
  plan.graph = eulerize(plan.roadmap, map);
  say(progress, "roadmap: " + std::to_string(plan.graph.nodes.size()) +
                    " nodes, " + std::to_string(plan.roadmap.edges.size()) +
                    " edges, " + std::to_string(plan.graph.edge_instance_count()) +
                    " after Eulerization");

  plan.candidates =
      generate_candidates(plan.graph, cfg.candidates, cfg.seed, cfg.cruise);
  plan.retained = filter_by_flight_time(plan.candidates, cfg.rho, cfg.cruise);
  if (plan.retained.empty()) {
    throw EmptyInputError("no candidate circuit flies in under rho = " +
                          format_number(cfg.rho) + " s");
  }
  say(progress, "scoring " + std::to_string(plan.retained.size()) + " of " +
                    std::to_string(plan.candidates.size()) + " candidates");
  plan.scores = score_circuits(plan.retained, plan.graph, map,
                               cfg.planner_options(), cfg.threads);
  for (auto& s : plan.scores) check_uncertainty_threshold(s, cfg.delta);
  plan.ranking = score_and_select(plan.scores);
  return plan;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t stream,
                         std::size_t circuit, std::size_t run) {
  return derive_seed(derive_seed(master, stream, circuit), stream, run);
}

TrialSet run_trials(const RunConfig& cfg, const EnvironmentMap& map,
                    const RoadmapGraph& graph, const Circuit& circuit,
                    const std::string& label, MeasurementMode mode,
                    std::size_t runs) {
  if (runs == 0) {
    throw Error(ErrorCategory::kSimulation, "simulate: at least one run is required");
  }
  validate_circuit(circuit, graph);
  TrialSet set;
  set.label = label;
  set.circuit_index = circuit.run_index;
  set.mode = mode;

  const auto rates = cfg.rates;
  const double ts = rates.ts();
  NoiseConfig noise = cfg.noise;
  noise.ts = ts;
  const auto kin = cfg.kinematics();
  const auto plan = nominal_trajectory(WaypointPath(circuit, graph), cfg.cruise, ts);
  set.nominal_flight_time = static_cast<double>(plan.steps()) * ts;
  MeasurementOptions mopts = cfg.measurement;
  mopts.mode = mode;

  set.truths.resize(runs);
  set.online.resize(runs);
  set.stats.resize(runs);
  parallel_for(
      runs,
      [&](std::size_t r) {
        Rng truth_rng(trial_seed(cfg.seed, kStreamTruth, circuit.run_index, r));
        auto truth = simulate_truth(circuit, graph, kin, ts, cfg.jitter, truth_rng);
        truth.run_index = r;
        truth.seed = trial_seed(cfg.seed, kStreamTruth, circuit.run_index, r);
        Rng meas_rng(
            trial_seed(cfg.seed, kStreamMeasurements, circuit.run_index, r));
        const auto events =
            synthesize_measurements(truth, map, rates, noise, mopts, meas_rng);
        auto online = run_online_ekf(events, truth, plan, noise, rates,
                                     kin.attitude, cfg.pec_norm);
        set.stats[r] = compute_stats(online, truth);
        set.truths[r] = std::move(truth);
        set.online[r] = std::move(online);
      },
      cfg.threads);
  set.aggregate = aggregate_trials(set.stats);
  return set;
}

PlanArtifact load_plan(const fs::path& dir) {
  PlanArtifact plan;
  const auto graph_path = dir / "graph.json";
  const json graph_doc = read_json(graph_path);
  try {
    plan.graph = graph_from_json(graph_doc.at("eulerized"));
  } catch (const json::exception&) {
    throw MissingArtifactError("corrupted artifact '" + graph_path.string() + "'");
  } catch (const Error&) {
    throw MissingArtifactError("corrupted artifact '" + graph_path.string() + "'");
  }
  const auto circuits_path = dir / "circuits.json";
  try {
    plan.circuits = circuits_from_json(read_json(circuits_path));
  } catch (const ParseError&) {
    throw MissingArtifactError("corrupted artifact '" + circuits_path.string() +
                               "'");
  }
  plan.ranking = read_json(dir / "ranking.json");
  return plan;
}

std::size_t resolve_selection(const PlanArtifact& plan,
                              const std::string& selection,
                              std::string* label) {
  for (const char* name : kHighlightLabels) {
    if (selection != name) continue;
    const json& v = plan.ranking.contains(name) ? plan.ranking.at(name) : json();
    if (!v.is_number_unsigned()) {
      throw UnknownSelectionError("selection '" + selection +
                                  "' is not available in this plan");
    }
    if (label) *label = selection;
    return v.get<std::size_t>();
  }
  std::size_t idx = 0;
  const auto* first = selection.data();
  const auto* last = first + selection.size();
  const auto res = std::from_chars(first, last, idx);
  if (selection.empty() || res.ec != std::errc() || res.ptr != last) {
    throw UnknownSelectionError(
        "unknown selection '" + selection +
        "' (expected best, worst, second_best, second_worst or an index)");
  }
  circuit_of(plan.circuits, idx);  // throws when absent
  if (label) *label = "circuit_" + std::to_string(idx);
  return idx;
}

PlanResult cmd_plan(const RunConfig& cfg, const ProgressFn& progress) {
  const auto map = load_map(cfg.map_path);
  auto plan = run_plan(cfg, map, progress);
  const fs::path& dir = cfg.output_dir;
  remove_stale_outputs(dir);

  write_json(dir / "config.json", config_to_json(cfg));
  write_json(dir / "map.json", map_to_json(map));
  write_json(dir / "graph.json",
             {{"roadmap", graph_to_json(plan.roadmap)},
              {"eulerized", graph_to_json(plan.graph)},
              {"edges_before_eulerize", plan.roadmap.edges.size()},
              {"edges_after_eulerize", plan.graph.edge_instance_count()}});
  write_json(dir / "circuits.json", circuits_to_json(plan.candidates));
  write_text(dir / "scores.csv", scores_csv(plan.scores, plan.retained));
  write_json(dir / "ranking.json", ranking_json(cfg, plan));
  for (const char* label : kHighlightLabels) {
    if (const auto idx = highlighted(plan.ranking, label)) {
      write_text(dir / (std::string("pec_") + label + ".csv"),
                 pec_series_csv(score_of(plan, *idx)));
    }
  }
  write_text(dir / "pec_totals.svg", totals_bar_chart(plan.scores, plan.ranking));
  say(progress, "plan written to " + dir.string());
  return plan;
}

TrialSet cmd_simulate(const RunConfig& cfg, const std::string& selection,
                      MeasurementMode mode, const ProgressFn& progress) {
  const fs::path& dir = cfg.output_dir;
  const auto plan = load_plan(dir);
  std::string label;
  const auto idx = resolve_selection(plan, selection, &label);
  const auto& circuit = circuit_of(plan.circuits, idx);
  const auto map = load_map(cfg.map_path);
  say(progress, "simulating " + label + " (circuit " + std::to_string(idx) +
                    "), " + to_string(mode) + ", " +
                    std::to_string(cfg.mc_runs) + " runs");
  auto set = run_trials(cfg, map, plan.graph, circuit, label, mode, cfg.mc_runs);

  const std::string tag = label + "_" + to_string(mode);
  const fs::path sim_dir = dir / ("sim_" + tag);
  for (std::size_t r = 0; r < set.stats.size(); ++r) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%02zu.csv", r + 1);
    write_text(sim_dir / name, run_csv(set.online[r], set.truths[r]));
  }
  write_text(sim_dir / "summary.csv", summary_csv(set.stats));
  write_text(sim_dir / "overlay.svg",
             estimate_overlay_svg(map, set.truths.front(), set.online.front(),
                                  label + " circuit " + std::to_string(idx) +
                                      ", run 1, " + to_string(mode)));
  write_text(sim_dir / "truth_runs.svg",
             truth_overlay_svg(map, set.truths,
                               label + " circuit " + std::to_string(idx) +
                                   ", truth of every run"));

  json runs = json::array();
  for (const auto& s : set.stats) runs.push_back(run_stats_json(s));
  write_json(dir / ("simulation_" + tag + ".json"),
             {{"label", label},
              {"circuit", idx},
              {"mode", to_string(mode)},
              {"seed", cfg.seed},
              {"mc_runs", set.stats.size()},
              {"length_m", circuit.length},
              {"planned_flight_time_s", circuit.length / cfg.cruise},
              {"nominal_flight_time_s", set.nominal_flight_time},
              {"runs", runs},
              {"mean", run_stats_json(set.aggregate.mean)},
              {"median", run_stats_json(set.aggregate.median)}});
  refresh_aggregate(dir, mode);
  return set;
}

json cmd_report(const fs::path& dir) {
  const json ranking = read_json(dir / "ranking.json");
  std::vector<fs::path> sim_files;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto name = entry.path().filename().string();
      if (name.starts_with("simulation_") && name.ends_with(".json")) {
        sim_files.push_back(entry.path());
      }
    }
  }
  std::sort(sim_files.begin(), sim_files.end());

  json report;
  std::string txt;
  try {
    report["planning"] = {
        {"seed", ranking.at("seed")},
        {"graph", ranking.at("graph")},
        {"candidates", ranking.at("candidates")},
        {"distinct_candidates", ranking.at("distinct_candidates")},
        {"retained_below_rho", ranking.at("retained_below_rho")},
        {"below_delta", ranking.at("below_delta")},
        {"rho_s", ranking.at("rho_s")},
        {"delta_m2", ranking.at("delta_m2")},
        {"pec_norm", ranking.at("pec_norm")},
        {"best", ranking.at("best")},
        {"worst", ranking.at("worst")},
        {"second_best", ranking.at("second_best")},
        {"second_worst", ranking.at("second_worst")},
        {"degenerate", ranking.at("degenerate")},
        {"worst_to_best_ratio", ranking.at("worst_to_best_ratio")},
        {"highlighted", ranking.at("highlighted")},
    };

    const auto& g = ranking.at("graph");
    txt += "Planning\n";
    txt += "  seed " + std::to_string(ranking.at("seed").get<std::uint64_t>()) +
           ", " + std::to_string(g.at("nodes").get<std::size_t>()) +
           " nodes, " +
           std::to_string(g.at("edges_before_eulerize").get<std::size_t>()) +
           " edges before Eulerization, " +
           std::to_string(g.at("edges_after_eulerize").get<std::size_t>()) +
           " after\n";
    txt += "  candidates " +
           std::to_string(ranking.at("candidates").get<std::size_t>()) +
           " (" +
           std::to_string(ranking.at("distinct_candidates").get<std::size_t>()) +
           " distinct), " +
           std::to_string(ranking.at("retained_below_rho").get<std::size_t>()) +
           " below rho, " +
           std::to_string(ranking.at("below_delta").get<std::size_t>()) +
           " below delta\n";
    txt += "  worst/best total PEC ratio " +
           fmt(ranking.at("worst_to_best_ratio").get<double>(), 3) +
           (ranking.at("degenerate").get<bool>() ? " (degenerate ranking)" : "") +
           "\n\n";
    txt += "  " + pad("path", 14) + pad("circuit", 9) + pad("total", 12) +
           pad("rms", 10) + pad("max", 10) + pad("sigma", 10) + pad("mean", 10) +
           pad("median", 10) + pad("cam", 7) + pad("lidar", 7) + "below_delta\n";
    for (const char* label : kHighlightLabels) {
      const auto& h = ranking.at("highlighted");
      if (!h.contains(label)) continue;
      const auto& p = h.at(label);
      const auto& st = p.at("pec_m2");
      txt += "  " + pad(label, 14) +
             pad(std::to_string(p.at("circuit").get<std::size_t>()), 9) +
             pad(fmt(p.at("total_pec_m2").get<double>(), 2), 12) +
             pad(fmt(st.at("rms").get<double>()), 10) +
             pad(fmt(st.at("max").get<double>()), 10) +
             pad(fmt(st.at("sigma").get<double>()), 10) +
             pad(fmt(st.at("mean").get<double>()), 10) +
             pad(fmt(st.at("median").get<double>()), 10) +
             pad(std::to_string(p.at("cam_updates").get<std::size_t>()), 7) +
             pad(std::to_string(p.at("lidar_updates").get<std::size_t>()), 7) +
             (p.at("threshold_ok").get<bool>() ? "yes" : "no") + "\n";
    }
  } catch (const json::exception&) {
    throw MissingArtifactError("corrupted artifact '" +
                               (dir / "ranking.json").string() + "'");
  }

  txt += "\nSimulation\n";
  if (sim_files.empty()) {
    report["simulation"] = {{"present", false}, {"sets", json::array()}};
    txt += "  absent (run the simulate command)\n";
  } else {
    json sets = json::array();
    txt += "  " + pad("path", 14) + pad("mode", 9) + pad("circuit", 9) +
           pad("runs", 6) + pad("time_s", 10) + pad("x_rms", 9) +
           pad("y_rms", 9) + pad("z_rms", 9) + pad("rms_3d", 9) + pad("mpe", 9) +
           pad("lidar", 8) + "cam\n";
    for (const auto& f : sim_files) {
      const json doc = read_json(f);
      try {
        sets.push_back({{"label", doc.at("label")},
                        {"mode", doc.at("mode")},
                        {"circuit", doc.at("circuit")},
                        {"mc_runs", doc.at("mc_runs")},
                        {"nominal_flight_time_s", doc.at("nominal_flight_time_s")},
                        {"mean", doc.at("mean")},
                        {"median", doc.at("median")}});
        const auto& m = doc.at("mean");
        txt += "  " + pad(doc.at("label").get<std::string>(), 14) +
               pad(doc.at("mode").get<std::string>(), 9) +
               pad(std::to_string(doc.at("circuit").get<std::size_t>()), 9) +
               pad(std::to_string(doc.at("mc_runs").get<std::size_t>()), 6) +
               pad(fmt(m.at("flight_time_s").get<double>(), 2), 10) +
               pad(fmt(m.at("x_rms_m").get<double>(), 3), 9) +
               pad(fmt(m.at("y_rms_m").get<double>(), 3), 9) +
               pad(fmt(m.at("z_rms_m").get<double>(), 3), 9) +
               pad(fmt(m.at("rms_3d_m").get<double>(), 3), 9) +
               pad(fmt(m.at("max_pos_err_m").get<double>(), 3), 9) +
               pad(std::to_string(m.at("lidar_updates").get<std::size_t>()), 8) +
               std::to_string(m.at("cam_updates").get<std::size_t>()) + "\n";
      } catch (const json::exception&) {
        throw MissingArtifactError("corrupted artifact '" + f.string() + "'");
      }
    }
    txt += "  (values are means over the runs of each set)\n";
    report["simulation"] = {{"present", true}, {"sets", sets}};
  }

  write_json(dir / "report.json", report);
  write_text(dir / "report.txt", txt);
  return report;
}

json cmd_all(const RunConfig& cfg, const std::vector<MeasurementMode>& modes,
             const ProgressFn& progress) {
  const auto plan = cmd_plan(cfg, progress);
  for (const auto mode : modes) {
    for (const auto& sel : cfg.selections) {
      if (highlighted(plan.ranking, sel) || !(sel == "second_best" ||
                                              sel == "second_worst")) {
        cmd_simulate(cfg, sel, mode, progress);
      }
    }
  }
  return cmd_report(cfg.output_dir);
}

}  // namespace beliefroute
