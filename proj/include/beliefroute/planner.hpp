#pragma once

#include <optional>
#include <span>
#include <vector>

#include "beliefroute/ekf.hpp"
#include "beliefroute/euler_cpp.hpp"
#include "beliefroute/map_env.hpp"
#include "beliefroute/roadmap.hpp"

namespace beliefroute {

struct KinematicProfile {
  double cruise = 0.5;  // m/s
  Attitude attitude{};
};

struct RateSchedule {
  double predict_hz = 50.0;
  double alt_hz = 5.0;
  double uwb_hz = 10.0;
  double cam_hz = 10.0;
  double lidar_hz = 10.0;

  double ts() const { return 1.0 / predict_hz; }
  /// Throws ValidationError unless every rate is positive and no sensor is
  /// faster than the prediction step.
  void validate() const;
};

enum class PecNorm { kSpectral, kFrobenius };

/// Norm of the 3x3 position block of P (spectral by default).
double pec(const Covariance& P, PecNorm norm = PecNorm::kSpectral);

struct PecSample {
  double t = 0.0;
  double pec = 0.0;
  bool cam_fired = false;
  bool lidar_fired = false;
};

/// Summary statistics of a PEC series (m^2).
struct SeriesStats {
  double mean = 0.0;
  double median = 0.0;
  double sigma = 0.0;  // population standard deviation
  double rms = 0.0;
  double max = 0.0;
};

SeriesStats series_stats(std::span<const double> values);

struct PathScore {
  std::size_t circuit_index = 0;
  std::vector<PecSample> pec_series;
  double total = 0.0;  // sum of pec_series
  double max_pec = 0.0;
  SeriesStats stats;
  std::size_t cam_update_count = 0;
  std::size_t lidar_update_count = 0;
  std::size_t skipped_updates = 0;  // degenerate-geometry skips
  bool threshold_ok = true;
};

struct PlannerOptions {
  KinematicProfile kinematics;
  RateSchedule rates;
  NoiseConfig noise;
  PecNorm norm = PecNorm::kSpectral;
};

/// Flies the circuit at cruise speed and propagates the belief covariance
/// with zero-innovation measurement updates. Altimeter and UWB fire on their
/// clocks; camera and LIDAR fire on their clocks only when the UAV is in the
/// sensor's field of view. PEC is recorded at the end of every prediction
/// step.
PathScore propagate_path(const Circuit& circuit, const RoadmapGraph& graph,
                         const EnvironmentMap& map,
                         const PlannerOptions& options);

/// Scores every circuit; circuits are independent and may be evaluated on
/// several threads. Output order follows input order.
std::vector<PathScore> score_circuits(const std::vector<Circuit>& circuits,
                                      const RoadmapGraph& graph,
                                      const EnvironmentMap& map,
                                      const PlannerOptions& options,
                                      unsigned threads = 0);

struct RankingReport {
  std::size_t best = 0;  // circuit indices
  std::size_t worst = 0;
  std::optional<std::size_t> second_best;
  std::optional<std::size_t> second_worst;
  std::vector<std::size_t> ascending;  // by total, ties by circuit index
  bool degenerate = false;             // every total equal
};

/// Throws EmptyInputError on an empty list.
RankingReport score_and_select(std::span<const PathScore> scores);

/// True iff every PEC value is below delta; the result is also stored in
/// s.threshold_ok.
bool check_uncertainty_threshold(PathScore& s, double delta);

}  // namespace beliefroute
