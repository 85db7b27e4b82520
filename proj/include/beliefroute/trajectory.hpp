#pragma once

#include <vector>

#include "beliefroute/euler_cpp.hpp"
#include "beliefroute/map_env.hpp"
#include "beliefroute/roadmap.hpp"

namespace beliefroute {

/// Straight-line polyline through a circuit's waypoints, parametrized by
/// arc length.
class WaypointPath {
 public:
  WaypointPath(const Circuit& circuit, const RoadmapGraph& graph);
  explicit WaypointPath(std::vector<Vec3> waypoints);

  double length() const { return cumulative_.back(); }
  const std::vector<Vec3>& waypoints() const { return waypoints_; }

  /// Point at arc length s (clamped to [0, length]).
  Vec3 point_at(double s) const;
  /// Unit direction of the segment containing s (zero on a degenerate path).
  Vec3 direction_at(double s) const;

 private:
  std::size_t segment_at(double s) const;

  std::vector<Vec3> waypoints_;
  std::vector<double> cumulative_;
};

/// Planned flight sampled at the prediction rate: positions[k] is the
/// nominal position at t = k * ts, flown at constant cruise speed.
struct NominalTrajectory {
  double ts = 0.02;
  std::vector<Vec3> positions;

  std::size_t steps() const { return positions.empty() ? 0 : positions.size() - 1; }
  /// Mean velocity over step k (1-based): (p_k - p_{k-1}) / ts, or zero
  /// beyond the end of the plan.
  Vec3 step_velocity(std::size_t k) const;
};

/// Number of prediction steps = ceil(length / (cruise * ts)).
NominalTrajectory nominal_trajectory(const WaypointPath& path, double cruise,
                                     double ts);

/// Fixed-phase sensor clock aligned to t = 0: fires on prediction step k
/// (1-based) when floor(k * rate / predict_rate) increments.
bool sensor_fires(std::size_t step, double rate_hz, double predict_hz);

}  // namespace beliefroute
