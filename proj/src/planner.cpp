#include "beliefroute/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "beliefroute/parallel.hpp"
#include "beliefroute/trajectory.hpp"

namespace beliefroute {

void RateSchedule::validate() const {
  for (double r : {predict_hz, alt_hz, uwb_hz, cam_hz, lidar_hz}) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw ValidationError(ErrorCategory::kConfig,
                            "rates: every rate must be > 0");
    }
  }
  for (double r : {alt_hz, uwb_hz, cam_hz, lidar_hz}) {
    if (r > predict_hz) {
      throw ValidationError(ErrorCategory::kConfig,
                            "rates: sensor rates may not exceed predict_hz");
    }
  }
}

double pec(const Covariance& P, PecNorm norm) {
  const Matrix3 block = P.block<3, 3>(3, 3);
  if (norm == PecNorm::kFrobenius) return block.norm();
  Eigen::SelfAdjointEigenSolver<Matrix3> eig(block, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

SeriesStats series_stats(std::span<const double> values) {
  SeriesStats s;
  if (values.empty()) return s;
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  s.max = values.front();
  for (double v : values) {
    sum += v;
    sum_sq += v * v;
    s.max = std::max(s.max, v);
  }
  s.mean = sum / n;
  s.rms = std::sqrt(sum_sq / n);
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.sigma = std::sqrt(var / n);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[mid]
                                    : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

PathScore propagate_path(const Circuit& circuit, const RoadmapGraph& graph,
                         const EnvironmentMap& map,
                         const PlannerOptions& options) {
  validate_circuit(circuit, graph);
  if (!(options.kinematics.cruise > 0.0)) {
    throw ValidationError(ErrorCategory::kConfig, "planner: cruise must be > 0");
  }
  options.rates.validate();
  NoiseConfig noise = options.noise;
  noise.ts = options.rates.ts();

  const WaypointPath path(circuit, graph);
  const NominalTrajectory nominal =
      nominal_trajectory(path, options.kinematics.cruise, noise.ts);
  const auto& rates = options.rates;
  const Attitude& att = options.kinematics.attitude;

  PathScore score;
  score.circuit_index = circuit.run_index;
  score.pec_series.reserve(nominal.steps());

  // Zero-innovation updates: each measurement equals its prediction, so only
  // the covariance moves. Degenerate geometry skips the update.
  auto apply = [&](BeliefState& b, auto&& update) -> bool {
    try {
      b = update(b);
      return true;
    } catch (const EstimationError&) {
      ++score.skipped_updates;
      return false;
    }
  };

  BeliefState b = initial_belief(nominal.positions.front());
  for (std::size_t k = 1; k <= nominal.steps(); ++k) {
    b.set_velocity(nominal.step_velocity(k));
    b = predict(b, noise);
    PecSample sample;
    sample.t = static_cast<double>(k) * noise.ts;

    if (sensor_fires(k, rates.alt_hz, rates.predict_hz)) {
      apply(b, [&](const BeliefState& s) {
        const auto m = altimeter_model(s.x_hat, att, noise.r_alt);
        return altimeter_update(s, m.predicted(0), att, noise);
      });
    }
    if (sensor_fires(k, rates.uwb_hz, rates.predict_hz)) {
      apply(b, [&](const BeliefState& s) {
        const auto m = uwb_model(s.x_hat, noise.r_uwb);
        return uwb_update(s, m.predicted(0), noise);
      });
    }
    if (sensor_fires(k, rates.cam_hz, rates.predict_hz) &&
        map.camera_sees(b.position())) {
      sample.cam_fired = apply(b, [&](const BeliefState& s) {
        return camera_update(s, camera_model(s.x_hat, noise.R_cam).predicted,
                             noise);
      });
    }
    if (sensor_fires(k, rates.lidar_hz, rates.predict_hz) &&
        map.lidar_sees(b.position())) {
      const double gamma =
          noise.gamma_model.gamma((b.position() - map.lidar_position()).norm());
      sample.lidar_fired = apply(b, [&](const BeliefState& s) {
        return lidar_update(s, s.position(), gamma, noise);
      });
    }
    score.cam_update_count += sample.cam_fired ? 1 : 0;
    score.lidar_update_count += sample.lidar_fired ? 1 : 0;
    sample.pec = pec(b.P, options.norm);
    score.pec_series.push_back(sample);
  }

  std::vector<double> values;
  values.reserve(score.pec_series.size());
  for (const auto& s : score.pec_series) values.push_back(s.pec);
  score.total = std::accumulate(values.begin(), values.end(), 0.0);
  score.stats = series_stats(values);
  score.max_pec = score.stats.max;
  return score;
}

std::vector<PathScore> score_circuits(const std::vector<Circuit>& circuits,
                                      const RoadmapGraph& graph,
                                      const EnvironmentMap& map,
                                      const PlannerOptions& options,
                                      unsigned threads) {
  std::vector<PathScore> out(circuits.size());
  parallel_for(
      circuits.size(),
      [&](std::size_t i) {
        out[i] = propagate_path(circuits[i], graph, map, options);
      },
      threads);
  return out;
}

RankingReport score_and_select(std::span<const PathScore> scores) {
  if (scores.empty()) throw EmptyInputError("ranking: no scored paths");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto ascending = order;
  std::sort(ascending.begin(), ascending.end(), [&](auto a, auto b) {
    if (scores[a].total != scores[b].total) {
      return scores[a].total < scores[b].total;
    }
    return scores[a].circuit_index < scores[b].circuit_index;
  });
  auto descending = order;
  std::sort(descending.begin(), descending.end(), [&](auto a, auto b) {
    if (scores[a].total != scores[b].total) {
      return scores[a].total > scores[b].total;
    }
    return scores[a].circuit_index < scores[b].circuit_index;
  });

  RankingReport r;
  r.best = scores[ascending.front()].circuit_index;
  r.worst = scores[descending.front()].circuit_index;
  if (scores.size() >= 2) {
    r.second_best = scores[ascending[1]].circuit_index;
    r.second_worst = scores[descending[1]].circuit_index;
  }
  for (auto i : ascending) r.ascending.push_back(scores[i].circuit_index);
  r.degenerate = scores[ascending.front()].total ==
                 scores[ascending.back()].total;
  return r;
}

bool check_uncertainty_threshold(PathScore& s, double delta) {
  if (!(delta > 0.0)) {
    throw ValidationError(ErrorCategory::kConfig,
                          "threshold: delta must be > 0");
  }
  s.threshold_ok = std::all_of(s.pec_series.begin(), s.pec_series.end(),
                               [&](const PecSample& p) { return p.pec < delta; });
  return s.threshold_ok;
}

}  // namespace beliefroute
