#include "beliefroute/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace beliefroute {

WaypointPath::WaypointPath(const Circuit& circuit, const RoadmapGraph& graph) {
  waypoints_.reserve(circuit.nodes.size());
  for (auto n : circuit.nodes) waypoints_.push_back(graph.nodes[index(n)]);
  if (waypoints_.empty()) waypoints_.push_back(graph.nodes[index(graph.source)]);
  cumulative_.assign(1, 0.0);
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    cumulative_.push_back(cumulative_.back() +
                          (waypoints_[i] - waypoints_[i - 1]).norm());
  }
}

WaypointPath::WaypointPath(std::vector<Vec3> waypoints)
    : waypoints_(std::move(waypoints)) {
  if (waypoints_.empty()) waypoints_.push_back(Vec3::Zero());
  cumulative_.assign(1, 0.0);
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    cumulative_.push_back(cumulative_.back() +
                          (waypoints_[i] - waypoints_[i - 1]).norm());
  }
}

std::size_t WaypointPath::segment_at(double s) const {
  // Index i such that cumulative_[i] <= s < cumulative_[i+1]; the last
  // segment absorbs s == length.
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t i = it == cumulative_.begin()
                      ? 0
                      : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  if (i + 1 >= cumulative_.size()) i = cumulative_.size() >= 2 ? cumulative_.size() - 2 : 0;
  // Skip zero-length segments forward where possible.
  while (i + 2 < cumulative_.size() && cumulative_[i + 1] - cumulative_[i] <= 0.0) ++i;
  return i;
}

Vec3 WaypointPath::point_at(double s) const {
  if (waypoints_.size() < 2) return waypoints_.front();
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_at(s);
  const double seg = cumulative_[i + 1] - cumulative_[i];
  if (seg <= 0.0) return waypoints_[i];
  const double f = std::clamp((s - cumulative_[i]) / seg, 0.0, 1.0);
  return waypoints_[i] + f * (waypoints_[i + 1] - waypoints_[i]);
}

Vec3 WaypointPath::direction_at(double s) const {
  if (waypoints_.size() < 2) return Vec3::Zero();
  const std::size_t i = segment_at(std::clamp(s, 0.0, length()));
  const Vec3 d = waypoints_[i + 1] - waypoints_[i];
  const double n = d.norm();
  return n > 0.0 ? Vec3(d / n) : Vec3::Zero();
}

Vec3 NominalTrajectory::step_velocity(std::size_t k) const {
  if (k == 0 || k >= positions.size()) return Vec3::Zero();
  return (positions[k] - positions[k - 1]) / ts;
}

NominalTrajectory nominal_trajectory(const WaypointPath& path, double cruise,
                                     double ts) {
  NominalTrajectory traj;
  traj.ts = ts;
  const double length = path.length();
  const auto steps =
      length > 0.0
          ? static_cast<std::size_t>(std::ceil(length / (cruise * ts) - 1e-9))
          : 0;
  traj.positions.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double s = std::min(static_cast<double>(k) * ts * cruise, length);
    traj.positions.push_back(path.point_at(s));
  }
  return traj;
}

bool sensor_fires(std::size_t step, double rate_hz, double predict_hz) {
  if (step == 0) return false;
  const double ratio = rate_hz / predict_hz;
  const auto now = static_cast<long long>(
      std::floor(static_cast<double>(step) * ratio + 1e-9));
  const auto before = static_cast<long long>(
      std::floor(static_cast<double>(step - 1) * ratio + 1e-9));
  return now > before;
}

}  // namespace beliefroute
