#include "beliefroute/map_env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "beliefroute/errors.hpp"

namespace beliefroute {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(ErrorCategory::kMap, "map: " + message);
}

bool finite(const Vec3& v) { return v.allFinite(); }

// Slab test: does the closed segment a->b touch the closed box?
bool segment_hits_box(const Vec3& a, const Vec3& b, const BoxObstacle& box) {
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec3 dir = b - a;
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = box.min_corner[axis];
    const double hi = box.max_corner[axis];
    if (std::abs(dir[axis]) < 1e-15) {
      if (a[axis] < lo || a[axis] > hi) return false;
      continue;
    }
    double ta = (lo - a[axis]) / dir[axis];
    double tb = (hi - a[axis]) / dir[axis];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

Vec3 read_vec3(const nlohmann::json& node, const char* key) {
  if (!node.contains(key)) {
    throw ParseError(ErrorCategory::kMap,
                     std::string("map: missing field '") + key + "'");
  }
  const auto& arr = node.at(key);
  if (!arr.is_array() || arr.size() != 3) {
    throw ParseError(ErrorCategory::kMap,
                     std::string("map: field '") + key +
                         "' must be an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!arr[i].is_number()) {
      throw ParseError(ErrorCategory::kMap,
                       std::string("map: field '") + key +
                           "' must contain numbers");
    }
    v[i] = arr[i].get<double>();
  }
  return v;
}

double read_number(const nlohmann::json& node, const char* key,
                   double fallback) {
  if (!node.contains(key)) return fallback;
  if (!node.at(key).is_number()) {
    throw ParseError(ErrorCategory::kMap,
                     std::string("map: field '") + key + "' must be a number");
  }
  return node.at(key).get<double>();
}

nlohmann::json vec_json(const Vec3& v) {
  return nlohmann::json::array({v.x(), v.y(), v.z()});
}

}  // namespace

bool BoxObstacle::contains(const Vec3& p, double margin) const {
  for (int axis = 0; axis < 3; ++axis) {
    if (p[axis] < min_corner[axis] - margin ||
        p[axis] > max_corner[axis] + margin) {
      return false;
    }
  }
  return true;
}

EnvironmentMap::EnvironmentMap(Vec3 bounds_min, Vec3 bounds_max,
                               std::vector<BoxObstacle> obstacles, UgvRig rig,
                               double collision_margin, double segment_step)
    : bounds_min_(std::move(bounds_min)),
      bounds_max_(std::move(bounds_max)),
      obstacles_(std::move(obstacles)),
      rig_(std::move(rig)),
      collision_margin_(collision_margin),
      segment_step_(segment_step) {
  require(finite(bounds_min_) && finite(bounds_max_), "bounds must be finite");
  require((bounds_min_.array() < bounds_max_.array()).all(),
          "bounds_min must be strictly below bounds_max");
  require(std::isfinite(collision_margin_) && collision_margin_ >= 0.0,
          "collision_margin_m must be >= 0");
  require(std::isfinite(segment_step_) && segment_step_ > 0.0,
          "segment_step_m must be > 0");
  require(finite(rig_.position) && in_bounds(rig_.position),
          "UGV position must lie inside the bounds");
  require(finite(rig_.deploy_offset), "deploy offset must be finite");
  require(rig_.lidar_pitch >= 0.0 && rig_.lidar_pitch < std::numbers::pi / 2,
          "lidar pitch must be in [0, 90) degrees");
  require(rig_.lidar_vertical_halfangle > 0.0 &&
              rig_.lidar_vertical_halfangle < std::numbers::pi / 2,
          "lidar half-angle must be in (0, 90) degrees");
  require(rig_.lidar_max_range > 0.0, "lidar max range must be > 0");
  require(rig_.lidar_mount_height >= 0.0, "lidar mount height must be >= 0");
  require(rig_.camera_mount_height > 0.0, "camera mount height must be > 0");
  require(rig_.camera_max_range > 0.0, "camera max range must be > 0");
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    const auto& box = obstacles_[i];
    const std::string tag = "obstacle " + std::to_string(i);
    require(finite(box.min_corner) && finite(box.max_corner),
            tag + " must be finite");
    require((box.min_corner.array() <= box.max_corner.array()).all(),
            tag + " has min corner above max corner");
    require((box.max_corner.array() >= bounds_min_.array()).all() &&
                (box.min_corner.array() <= bounds_max_.array()).all(),
            tag + " does not intersect the bounds");
  }
}

EnvironmentMap EnvironmentMap::with_margin(double collision_margin) const {
  return EnvironmentMap(bounds_min_, bounds_max_, obstacles_, rig_,
                        collision_margin, segment_step_);
}

Vec3 EnvironmentMap::camera_position() const {
  return rig_.position - Vec3(0.0, 0.0, rig_.camera_mount_height);
}

Vec3 EnvironmentMap::lidar_position() const {
  return rig_.position - Vec3(0.0, 0.0, rig_.lidar_mount_height);
}

Vec3 EnvironmentMap::deploy_position() const {
  return rig_.position + rig_.deploy_offset;
}

bool EnvironmentMap::in_bounds(const Vec3& p) const {
  return (p.array() >= bounds_min_.array()).all() &&
         (p.array() <= bounds_max_.array()).all();
}

bool EnvironmentMap::is_free(const Vec3& p) const {
  if (!finite(p) || !in_bounds(p)) return false;
  return std::none_of(obstacles_.begin(), obstacles_.end(),
                      [&](const BoxObstacle& box) {
                        return box.contains(p, collision_margin_);
                      });
}

bool EnvironmentMap::segment_is_free(const Vec3& a, const Vec3& b) const {
  // Walk from the lexicographically smaller endpoint so (a, b) and (b, a)
  // visit bit-identical sample points.
  const bool swap = std::lexicographical_compare(b.data(), b.data() + 3,
                                                 a.data(), a.data() + 3);
  const Vec3& from = swap ? b : a;
  const Vec3& to = swap ? a : b;
  const double length = (to - from).norm();
  const auto steps =
      static_cast<long>(std::ceil(length / segment_step_ - 1e-12));
  if (!is_free(from) || !is_free(to)) return false;
  for (long i = 1; i < steps; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(steps);
    if (!is_free(from + s * (to - from))) return false;
  }
  return true;
}

bool EnvironmentMap::line_of_sight(const Vec3& a, const Vec3& b) const {
  return std::none_of(
      obstacles_.begin(), obstacles_.end(),
      [&](const BoxObstacle& box) { return segment_hits_box(a, b, box); });
}

bool EnvironmentMap::camera_sees(const Vec3& uav) const {
  if (height_above_ground(uav) <= rig_.camera_mount_height) return false;
  const Vec3 cam = camera_position();
  if ((uav - cam).norm() > rig_.camera_max_range) return false;
  return line_of_sight(cam, uav);
}

double EnvironmentMap::lidar_elevation(const Vec3& uav) const {
  const Vec3 rel = uav - lidar_position();
  const double range = rel.norm();
  if (range == 0.0) return 0.0;
  // Scan-plane normal: local "up" (-D) tilted backwards by the pitch, so the
  // forward (+N) boresight rises by the pitch angle.
  const double pitch = rig_.lidar_pitch;
  const Vec3 plane_up(-std::sin(pitch), 0.0, -std::cos(pitch));
  return std::asin(std::clamp(rel.dot(plane_up) / range, -1.0, 1.0));
}

bool EnvironmentMap::lidar_sees(const Vec3& uav) const {
  const Vec3 lidar = lidar_position();
  const double range = (uav - lidar).norm();
  if (range > rig_.lidar_max_range || range == 0.0) return false;
  if (std::abs(lidar_elevation(uav)) > rig_.lidar_vertical_halfangle) {
    return false;
  }
  return line_of_sight(lidar, uav);
}

EnvironmentMap parse_map(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw ParseError(ErrorCategory::kMap, "map: document must be an object");
  }
  const Vec3 bmin = read_vec3(doc, "bounds_min");
  const Vec3 bmax = read_vec3(doc, "bounds_max");

  std::vector<BoxObstacle> obstacles;
  if (doc.contains("obstacles")) {
    const auto& arr = doc.at("obstacles");
    if (!arr.is_array()) {
      throw ParseError(ErrorCategory::kMap, "map: 'obstacles' must be a list");
    }
    for (const auto& item : arr) {
      obstacles.push_back({read_vec3(item, "min"), read_vec3(item, "max")});
    }
  }

  UgvRig rig;
  if (doc.contains("ugv")) {
    const auto& ugv = doc.at("ugv");
    if (!ugv.is_object()) {
      throw ParseError(ErrorCategory::kMap, "map: 'ugv' must be an object");
    }
    if (ugv.contains("position")) rig.position = read_vec3(ugv, "position");
    if (ugv.contains("deploy_offset")) {
      rig.deploy_offset = read_vec3(ugv, "deploy_offset");
    }
    rig.lidar_pitch =
        read_number(ugv, "lidar_pitch_deg", rig.lidar_pitch / kDegToRad) *
        kDegToRad;
    rig.lidar_vertical_halfangle =
        read_number(ugv, "lidar_halfangle_deg",
                    rig.lidar_vertical_halfangle / kDegToRad) *
        kDegToRad;
    rig.lidar_max_range =
        read_number(ugv, "lidar_max_range_m", rig.lidar_max_range);
    rig.lidar_mount_height =
        read_number(ugv, "lidar_mount_height_m", rig.lidar_mount_height);
    rig.camera_mount_height =
        read_number(ugv, "camera_mount_height_m", rig.camera_mount_height);
    rig.camera_max_range =
        read_number(ugv, "camera_max_range_m", rig.camera_max_range);
  }

  return EnvironmentMap(bmin, bmax, std::move(obstacles), rig,
                        read_number(doc, "collision_margin_m", 0.3),
                        read_number(doc, "segment_step_m", 0.1));
}

EnvironmentMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(ErrorCategory::kMap,
                     "map: cannot open '" + path.string() + "'");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(ErrorCategory::kMap,
                     "map: malformed file '" + path.string() + "': " + e.what());
  }
  return parse_map(doc);
}

nlohmann::json map_to_json(const EnvironmentMap& map) {
  nlohmann::json obstacles = nlohmann::json::array();
  for (const auto& box : map.obstacles()) {
    obstacles.push_back(
        {{"min", vec_json(box.min_corner)}, {"max", vec_json(box.max_corner)}});
  }
  const auto& rig = map.rig();
  return {
      {"bounds_min", vec_json(map.bounds_min())},
      {"bounds_max", vec_json(map.bounds_max())},
      {"collision_margin_m", map.collision_margin()},
      {"segment_step_m", map.segment_step()},
      {"obstacles", obstacles},
      {"ugv",
       {{"position", vec_json(rig.position)},
        {"deploy_offset", vec_json(rig.deploy_offset)},
        {"lidar_pitch_deg", rig.lidar_pitch / kDegToRad},
        {"lidar_halfangle_deg", rig.lidar_vertical_halfangle / kDegToRad},
        {"lidar_max_range_m", rig.lidar_max_range},
        {"lidar_mount_height_m", rig.lidar_mount_height},
        {"camera_mount_height_m", rig.camera_mount_height},
        {"camera_max_range_m", rig.camera_max_range}}},
  };
}

}  // namespace beliefroute
