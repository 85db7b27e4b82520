#include "beliefroute/montecarlo.hpp"

#include <algorithm>
#include <cmath>

namespace beliefroute {
namespace {

Vec3 gaussian3(Rng& rng, std::normal_distribution<double>& normal) {
  const double a = normal(rng);
  const double b = normal(rng);
  const double c = normal(rng);
  return {a, b, c};
}

Vec3 correlated_noise(const Matrix3& cov, Rng& rng,
                      std::normal_distribution<double>& normal) {
  // Covariances here may be singular (zero noise), so use LDLT factors.
  Eigen::LDLT<Matrix3> ldlt(cov);
  const Vec3 w = gaussian3(rng, normal);
  const Vec3 scaled = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt().cwiseProduct(w);
  return ldlt.transpositionsP().transpose() *
         (ldlt.matrixL() * scaled);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

const char* sensor_name(SensorKind kind) {
  switch (kind) {
    case SensorKind::kAltimeter:
      return "alt";
    case SensorKind::kUwb:
      return "uwb";
    case SensorKind::kCamera:
      return "cam";
    case SensorKind::kLidar:
      return "lidar";
  }
  return "?";
}

TruthTrajectory simulate_truth(const Circuit& circuit,
                               const RoadmapGraph& graph,
                               const KinematicProfile& kin, double ts,
                               const JitterConfig& jitter, Rng& rng) {
  if (!(jitter.cross_track_sigma >= 0.0) || !(jitter.speed_sigma >= 0.0) ||
      !(jitter.time_constant > 0.0)) {
    throw ValidationError(ErrorCategory::kConfig,
                          "jitter: sigmas must be >= 0 and tau > 0");
  }
  const WaypointPath path(circuit, graph);
  const double length = path.length();
  const double cruise = kin.cruise;
  const double step_len = cruise * ts;
  const double steps_needed = length / step_len;

  const double decay = std::exp(-ts / jitter.time_constant);
  const double drive = std::sqrt(1.0 - decay * decay);
  std::normal_distribution<double> normal(0.0, 1.0);

  TruthTrajectory truth;
  truth.circuit_index = circuit.run_index;
  truth.samples.push_back({0.0, path.point_at(0.0), Vec3::Zero()});
  if (length <= 0.0) return truth;

  double speed_error = 0.0;
  double progress_error = 0.0;  // integrated along-track error, m
  Vec3 offset = Vec3::Zero();
  // Guard against a stalled vehicle when speed_sigma is large.
  const std::size_t max_steps =
      static_cast<std::size_t>(std::ceil(steps_needed)) * 20 + 10;

  for (std::size_t k = 1; k <= max_steps; ++k) {
    speed_error =
        decay * speed_error + jitter.speed_sigma * drive * normal(rng);
    speed_error = std::max(speed_error, -0.9 * cruise);
    progress_error += speed_error * ts;
    offset = decay * offset +
             jitter.cross_track_sigma * drive * gaussian3(rng, normal);

    const double kd = static_cast<double>(k);
    const bool done = kd + progress_error / step_len >= steps_needed - 1e-9;
    const double s = std::min(kd * ts * cruise + progress_error, length);
    const Vec3 dir = path.direction_at(s);
    const Vec3 cross = offset - offset.dot(dir) * dir;
    TruthSample sample;
    sample.t = kd * ts;
    sample.position = path.point_at(s) + cross;
    sample.velocity = (sample.position - truth.samples.back().position) / ts;
    truth.samples.push_back(sample);
    if (done) break;
  }
  return truth;
}

std::vector<MeasurementEvent> synthesize_measurements(
    const TruthTrajectory& truth, const EnvironmentMap& map,
    const RateSchedule& rates, const NoiseConfig& noise,
    const MeasurementOptions& options, Rng& rng) {
  if (!(options.dropout >= 0.0 && options.dropout <= 1.0)) {
    throw ValidationError(ErrorCategory::kConfig,
                          "measurements: dropout must be in [0, 1]");
  }
  rates.validate();
  const bool noisy = options.mode == MeasurementMode::kNoisy;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto noise_scale = [&]() {
    if (!noisy) return 0.0;
    if (options.outliers && unit(rng) < options.outlier_probability) {
      return options.outlier_scale;
    }
    return 1.0;
  };
  auto dropped = [&]() { return noisy && unit(rng) < options.dropout; };

  std::vector<MeasurementEvent> events;
  for (std::size_t k = 1; k < truth.samples.size(); ++k) {
    const auto& sample = truth.samples[k];
    const Vec3& r = sample.position;
    MeasurementEvent ev;
    ev.t = sample.t;
    ev.step = k;

    if (sensor_fires(k, rates.alt_hz, rates.predict_hz)) {
      ev.sensor = SensorKind::kAltimeter;
      const double scale = noise_scale();
      ev.value = Vec3(-r.z() + scale * std::sqrt(noise.r_alt) * normal(rng),
                      0.0, 0.0);
      events.push_back(ev);
    }
    if (sensor_fires(k, rates.uwb_hz, rates.predict_hz)) {
      ev.sensor = SensorKind::kUwb;
      const double scale = noise_scale();
      ev.value =
          Vec3(r.norm() + scale * std::sqrt(noise.r_uwb) * normal(rng), 0.0, 0.0);
      events.push_back(ev);
    }
    if (sensor_fires(k, rates.cam_hz, rates.predict_hz) && map.camera_sees(r)) {
      ev.sensor = SensorKind::kCamera;
      const double d = r.norm();
      ev.value = d > 0.0 ? Vec3(r / d) : Vec3::Zero();
      const double scale = noise_scale();
      if (scale > 0.0) {
        const double sin_elev =
            std::max(std::abs(d > 0.0 ? -r.z() / d : 0.0), kMinSinElevation);
        ev.value += scale * correlated_noise(noise.R_cam / sin_elev, rng, normal);
      }
      ev.dropped = dropped();
      events.push_back(ev);
      ev.dropped = false;
    }
    if (sensor_fires(k, rates.lidar_hz, rates.predict_hz) &&
        map.lidar_sees(r)) {
      ev.sensor = SensorKind::kLidar;
      ev.gamma = noise.gamma_model.gamma((r - map.lidar_position()).norm());
      ev.value = r;
      const double scale = noise_scale();
      if (scale > 0.0) {
        ev.value +=
            scale * correlated_noise(ev.gamma * noise.R_lidar, rng, normal);
      }
      ev.dropped = dropped();
      events.push_back(ev);
      ev.dropped = false;
      ev.gamma = 1.0;
    }
  }
  return events;
}

OnlineResult run_online_ekf(const std::vector<MeasurementEvent>& events,
                            const TruthTrajectory& truth,
                            const NominalTrajectory& plan,
                            const NoiseConfig& noise_in,
                            const RateSchedule& rates, const Attitude& attitude,
                            PecNorm norm) {
  rates.validate();
  NoiseConfig noise = noise_in;
  noise.ts = rates.ts();

  OnlineResult result;
  if (truth.samples.empty()) return result;
  const std::size_t steps = truth.samples.size() - 1;
  result.track.reserve(steps);

  BeliefState b = initial_belief(
      plan.positions.empty() ? truth.samples.front().position
                             : plan.positions.front());
  std::size_t next = 0;
  for (std::size_t k = 1; k <= steps; ++k) {
    b.set_velocity(plan.step_velocity(k));
    b = predict(b, noise);
    // Events from earlier steps (if any) are applied late rather than lost.
    for (; next < events.size() && events[next].step <= k; ++next) {
      const auto& ev = events[next];
      if (ev.dropped) continue;
      try {
        switch (ev.sensor) {
          case SensorKind::kAltimeter:
            b = altimeter_update(b, ev.value.x(), attitude, noise);
            break;
          case SensorKind::kUwb:
            b = uwb_update(b, ev.value.x(), noise);
            break;
          case SensorKind::kCamera:
            b = camera_update(b, ev.value, noise);
            ++result.cam_updates;
            break;
          case SensorKind::kLidar:
            b = lidar_update(b, ev.value, ev.gamma, noise);
            ++result.lidar_updates;
            break;
        }
      } catch (const EstimationError&) {
        ++result.skipped_updates;
      }
    }
    result.track.push_back(
        {static_cast<double>(k) * noise.ts, b.position(), pec(b.P, norm)});
  }
  return result;
}

Vec3 truth_position_at(const TruthTrajectory& truth, double t) {
  const auto& s = truth.samples;
  if (s.empty()) return Vec3::Zero();
  if (t <= s.front().t) return s.front().position;
  if (t >= s.back().t) return s.back().position;
  const auto it = std::upper_bound(
      s.begin(), s.end(), t,
      [](double value, const TruthSample& x) { return value < x.t; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double span = hi.t - lo.t;
  if (span <= 0.0) return lo.position;
  const double f = (t - lo.t) / span;
  return lo.position + f * (hi.position - lo.position);
}

RunStats compute_stats(const std::vector<EstimateSample>& estimates,
                       const TruthTrajectory& truth) {
  if (estimates.empty() || truth.samples.empty()) {
    throw EmptyInputError("stats: empty estimate or truth track");
  }
  RunStats st;
  st.flight_time = truth.flight_time();
  const auto n = static_cast<double>(estimates.size());
  Vec3 sum_sq = Vec3::Zero();
  std::vector<double> err3;
  err3.reserve(estimates.size());
  for (const auto& e : estimates) {
    const Vec3 diff = e.position - truth_position_at(truth, e.t);
    sum_sq += diff.cwiseProduct(diff);
    err3.push_back(diff.norm());
  }
  st.x_rms = std::sqrt(sum_sq.x() / n);
  st.y_rms = std::sqrt(sum_sq.y() / n);
  st.z_rms = std::sqrt(sum_sq.z() / n);
  st.rms_3d = std::sqrt(sum_sq.sum() / n);
  double total = 0.0;
  for (double e : err3) total += e;
  st.mean = total / n;
  double var = 0.0;
  for (double e : err3) var += (e - st.mean) * (e - st.mean);
  st.sigma = std::sqrt(var / n);
  st.max_pos_err = *std::max_element(err3.begin(), err3.end());
  st.median = median_of(std::move(err3));
  return st;
}

RunStats compute_stats(const OnlineResult& online, const TruthTrajectory& truth) {
  RunStats st = compute_stats(online.track, truth);
  st.cam_updates = online.cam_updates;
  st.lidar_updates = online.lidar_updates;
  return st;
}

TrialAggregate aggregate_trials(const std::vector<RunStats>& runs) {
  if (runs.empty()) throw EmptyInputError("aggregate: no runs");
  TrialAggregate agg;
  auto field = [&](auto member, auto& mean_out, auto& median_out) {
    std::vector<double> values;
    values.reserve(runs.size());
    for (const auto& r : runs) values.push_back(static_cast<double>(r.*member));
    double sum = 0.0;
    for (double v : values) sum += v;
    using T = std::remove_reference_t<decltype(mean_out)>;
    const double mean = sum / static_cast<double>(values.size());
    const double median = median_of(std::move(values));
    if constexpr (std::is_integral_v<T>) {
      mean_out = static_cast<T>(std::llround(mean));
      median_out = static_cast<T>(std::llround(median));
    } else {
      mean_out = mean;
      median_out = median;
    }
  };
  field(&RunStats::flight_time, agg.mean.flight_time, agg.median.flight_time);
  field(&RunStats::x_rms, agg.mean.x_rms, agg.median.x_rms);
  field(&RunStats::y_rms, agg.mean.y_rms, agg.median.y_rms);
  field(&RunStats::z_rms, agg.mean.z_rms, agg.median.z_rms);
  field(&RunStats::rms_3d, agg.mean.rms_3d, agg.median.rms_3d);
  field(&RunStats::sigma, agg.mean.sigma, agg.median.sigma);
  field(&RunStats::mean, agg.mean.mean, agg.median.mean);
  field(&RunStats::median, agg.mean.median, agg.median.median);
  field(&RunStats::max_pos_err, agg.mean.max_pos_err, agg.median.max_pos_err);
  field(&RunStats::lidar_updates, agg.mean.lidar_updates,
        agg.median.lidar_updates);
  field(&RunStats::cam_updates, agg.mean.cam_updates, agg.median.cam_updates);
  return agg;
}

}  // namespace beliefroute
