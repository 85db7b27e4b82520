#pragma once

#include <cstdint>
#include <vector>

#include "beliefroute/ekf.hpp"
#include "beliefroute/euler_cpp.hpp"
#include "beliefroute/map_env.hpp"
#include "beliefroute/planner.hpp"
#include "beliefroute/random.hpp"
#include "beliefroute/roadmap.hpp"
#include "beliefroute/trajectory.hpp"

namespace beliefroute {

/// Execution variability of the waypoint follower. Cross-track offset and
/// speed error are independent first-order Gauss-Markov processes.
struct JitterConfig {
  double cross_track_sigma = 0.3;  // m, stationary std-dev
  double speed_sigma = 0.05;       // m/s, stationary std-dev
  double time_constant = 2.0;      // s
};

struct TruthSample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

struct TruthTrajectory {
  std::vector<TruthSample> samples;  // samples[k].t == k * ts
  std::size_t circuit_index = 0;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;

  double flight_time() const {
    return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
  }
};

/// Follows the circuit's straight segments at cruise speed, sampled every
/// `ts` seconds. Along-track progress integrates cruise + speed error; a
/// cross-track offset (perpendicular to the current segment) is added on
/// top. Zero jitter reproduces nominal_trajectory() exactly.
TruthTrajectory simulate_truth(const Circuit& circuit,
                               const RoadmapGraph& graph,
                               const KinematicProfile& kin, double ts,
                               const JitterConfig& jitter, Rng& rng);

enum class SensorKind { kAltimeter, kUwb, kCamera, kLidar };
const char* sensor_name(SensorKind kind);

struct MeasurementEvent {
  double t = 0.0;
  std::size_t step = 0;  // prediction step the event belongs to
  SensorKind sensor = SensorKind::kAltimeter;
  Vec3 value = Vec3::Zero();  // scalar sensors use value[0]
  double gamma = 1.0;         // LIDAR only
  bool dropped = false;
};

enum class MeasurementMode { kNoisy, kPerfect };

struct MeasurementOptions {
  MeasurementMode mode = MeasurementMode::kNoisy;
  double dropout = 0.1;  // per camera/LIDAR opportunity, noisy mode only
  bool outliers = false;
  double outlier_probability = 0.02;
  double outlier_scale = 10.0;  // noise std-dev multiplier for outliers
};

/// Builds the sensor stream from the truth track. Altimeter and UWB fire on
/// every tick; camera and LIDAR only inside their fields of view. Noisy mode
/// adds zero-mean Gaussian noise (camera noise scaled like the filter's
/// R_eff, LIDAR by gamma) and applies dropout; perfect mode is exact.
std::vector<MeasurementEvent> synthesize_measurements(
    const TruthTrajectory& truth, const EnvironmentMap& map,
    const RateSchedule& rates, const NoiseConfig& noise,
    const MeasurementOptions& options, Rng& rng);

struct EstimateSample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  double pec = 0.0;
};

struct OnlineResult {
  std::vector<EstimateSample> track;
  std::size_t cam_updates = 0;
  std::size_t lidar_updates = 0;
  std::size_t skipped_updates = 0;
};

/// Online filter replay. Each prediction step takes the plan's commanded
/// velocity for that step (zero once the plan is exhausted), predicts, then
/// applies every non-dropped event of that step in time order.
OnlineResult run_online_ekf(const std::vector<MeasurementEvent>& events,
                            const TruthTrajectory& truth,
                            const NominalTrajectory& plan,
                            const NoiseConfig& noise, const RateSchedule& rates,
                            const Attitude& attitude = {},
                            PecNorm norm = PecNorm::kSpectral);

struct RunStats {
  double flight_time = 0.0;
  double x_rms = 0.0;
  double y_rms = 0.0;
  double z_rms = 0.0;
  double rms_3d = 0.0;
  double sigma = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double max_pos_err = 0.0;
  std::size_t lidar_updates = 0;
  std::size_t cam_updates = 0;
};

/// Position-error statistics of `estimates` against `truth` (truth linearly
/// interpolated to the estimate timestamps). Throws EmptyInputError on an
/// empty track. Update counts are taken from `online` when given.
RunStats compute_stats(const std::vector<EstimateSample>& estimates,
                       const TruthTrajectory& truth);
RunStats compute_stats(const OnlineResult& online, const TruthTrajectory& truth);

struct TrialAggregate {
  RunStats mean;
  RunStats median;
};

/// Fieldwise mean and median. Throws EmptyInputError on an empty list.
TrialAggregate aggregate_trials(const std::vector<RunStats>& runs);

/// Truth position at time t (linear interpolation, clamped at the ends).
Vec3 truth_position_at(const TruthTrajectory& truth, double t);

}  // namespace beliefroute
