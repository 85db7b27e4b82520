#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace beliefroute {

/// Local North-East-Down vector (meters or m/s). Index 0 = N, 1 = E, 2 = D
/// (positive down). The navigation origin is the UGV.
using Vec3 = Eigen::Vector3d;

inline constexpr double kDegToRad = 0.017453292519943295;

struct BoxObstacle {
  Vec3 min_corner;
  Vec3 max_corner;

  /// True when p lies inside the box grown by `margin` on every side.
  bool contains(const Vec3& p, double margin = 0.0) const;
};

/// Sensor rig carried by the stationary UGV.
struct UgvRig {
  Vec3 position = Vec3::Zero();  // navigation-frame origin
  double lidar_pitch = 15.0 * kDegToRad;
  double lidar_vertical_halfangle = 22.5 * kDegToRad;
  double lidar_max_range = 50.0;
  double lidar_mount_height = 0.8;
  double camera_mount_height = 0.8;
  double camera_max_range = 6.0;
  // UAV take-off / landing point relative to the UGV (roadmap source node).
  Vec3 deploy_offset = Vec3(1.0, 0.0, -1.0);
};

/// Tunnel bounds, box obstacles and the UGV rig. Immutable after
/// construction; every query is a pure function of its arguments.
class EnvironmentMap {
 public:
  EnvironmentMap(Vec3 bounds_min, Vec3 bounds_max,
                 std::vector<BoxObstacle> obstacles, UgvRig rig,
                 double collision_margin = 0.3, double segment_step = 0.1);

  const Vec3& bounds_min() const { return bounds_min_; }
  const Vec3& bounds_max() const { return bounds_max_; }
  const std::vector<BoxObstacle>& obstacles() const { return obstacles_; }
  const UgvRig& rig() const { return rig_; }
  double collision_margin() const { return collision_margin_; }
  double segment_step() const { return segment_step_; }

  /// Copy with a different inflation margin (all other fields equal).
  EnvironmentMap with_margin(double collision_margin) const;

  /// Floor of the tunnel, in D.
  double ground_d() const { return bounds_max_.z(); }
  double height_above_ground(const Vec3& p) const {
    return ground_d() - p.z();
  }
  Vec3 camera_position() const;
  Vec3 lidar_position() const;
  Vec3 deploy_position() const;

  bool in_bounds(const Vec3& p) const;
  bool is_free(const Vec3& p) const;

  /// Sampled at segment_step() including both endpoints. Symmetric in a, b.
  bool segment_is_free(const Vec3& a, const Vec3& b) const;

  /// Exact segment/box test against the raw (uninflated) obstacles.
  bool line_of_sight(const Vec3& a, const Vec3& b) const;

  bool camera_sees(const Vec3& uav) const;
  bool lidar_sees(const Vec3& uav) const;

  /// Elevation of `uav` above the LIDAR's pitched scan plane, radians.
  double lidar_elevation(const Vec3& uav) const;

 private:
  Vec3 bounds_min_;
  Vec3 bounds_max_;
  std::vector<BoxObstacle> obstacles_;
  UgvRig rig_;
  double collision_margin_;
  double segment_step_;
};

EnvironmentMap parse_map(const nlohmann::json& doc);
EnvironmentMap load_map(const std::filesystem::path& path);
nlohmann::json map_to_json(const EnvironmentMap& map);

}  // namespace beliefroute
