#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "beliefroute/errors.hpp"
#include "beliefroute/map_env.hpp"
#include "fixtures.hpp"

using namespace beliefroute;
using brtest::map_with;
using brtest::open_map;

namespace {

nlohmann::json minimal_map_doc() {
  return nlohmann::json::parse(R"({
    "bounds_min": [-5, -5, -8], "bounds_max": [35, 5, 0],
    "obstacles": [{"min": [8, -4.5, -2.5], "max": [11, -1, 0]}],
    "ugv": {"position": [0, 0, 0]}
  })");
}

// Inflated-box containment written out independently of BoxObstacle.
bool brute_force_free(const EnvironmentMap& map, const Vec3& p) {
  for (int a = 0; a < 3; ++a) {
    if (p[a] < map.bounds_min()[a] || p[a] > map.bounds_max()[a]) return false;
  }
  const double m = map.collision_margin();
  for (const auto& box : map.obstacles()) {
    bool inside = true;
    for (int a = 0; a < 3; ++a) {
      inside = inside && p[a] >= box.min_corner[a] - m &&
               p[a] <= box.max_corner[a] + m;
    }
    if (inside) return false;
  }
  return true;
}

bool dense_segment_free(const EnvironmentMap& map, const Vec3& a, const Vec3& b) {
  const auto n = static_cast<long>(std::ceil((b - a).norm() / 0.001));
  for (long i = 0; i <= n; ++i) {
    const double s = n == 0 ? 0.0 : static_cast<double>(i) / n;
    if (!brute_force_free(map, a + s * (b - a))) return false;
  }
  return true;
}

Vec3 random_point(std::mt19937_64& rng, const EnvironmentMap& map) {
  Vec3 p;
  for (int a = 0; a < 3; ++a) {
    std::uniform_real_distribution<double> u(map.bounds_min()[a], map.bounds_max()[a]);
    p[a] = u(rng);
  }
  return p;
}

}  // namespace

TEST(LoadMap, DefaultTunnelHasPaperExtent) {
  const auto map = load_map(brtest::default_map_path());
  const Vec3 span = map.bounds_max() - map.bounds_min();
  EXPECT_DOUBLE_EQ(span.x(), 40.0);
  EXPECT_DOUBLE_EQ(span.y(), 10.0);
  EXPECT_DOUBLE_EQ(span.z(), 8.0);
  EXPECT_EQ(map.obstacles().size(), 4u);
  EXPECT_DOUBLE_EQ(map.rig().lidar_pitch, 15.0 * kDegToRad);
  EXPECT_DOUBLE_EQ(map.rig().camera_mount_height, 0.8);
  EXPECT_DOUBLE_EQ(map.rig().camera_max_range, 6.0);
  EXPECT_TRUE(map.is_free(map.deploy_position()));
}

TEST(LoadMap, EmptyObstacleListLeavesInteriorFree) {
  auto doc = minimal_map_doc();
  doc["obstacles"] = nlohmann::json::array();
  const auto map = parse_map(doc);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(map.is_free(random_point(rng, map)));
}

TEST(LoadMap, InvertedBoxIsValidationError) {
  auto doc = minimal_map_doc();
  doc["obstacles"][0] = {{"min", {11, -1, 0}}, {"max", {8, -4.5, -2.5}}};
  try {
    parse_map(doc);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kMap);
  }
}

TEST(LoadMap, UgvOutsideBoundsIsValidationError) {
  auto doc = minimal_map_doc();
  doc["ugv"]["position"] = {-10, 0, 0};
  EXPECT_THROW(parse_map(doc), ValidationError);
}

TEST(LoadMap, ObstacleOutsideBoundsIsValidationError) {
  auto doc = minimal_map_doc();
  doc["obstacles"][0] = {{"min", {50, 0, -1}}, {"max", {51, 1, 0}}};
  EXPECT_THROW(parse_map(doc), ValidationError);
}

TEST(LoadMap, MalformedFileIsParseError) {
  const auto path = std::filesystem::temp_directory_path() / "br_bad_map.json";
  std::ofstream(path) << "{ \"bounds_min\": [0, 0, ";
  try {
    load_map(path);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kMap);
  }
  std::filesystem::remove(path);
}

TEST(LoadMap, MissingFileIsParseError) {
  EXPECT_THROW(load_map("/nonexistent/map.json"), ParseError);
}

TEST(LoadMap, MissingFieldIsParseError) {
  auto doc = minimal_map_doc();
  doc.erase("bounds_max");
  EXPECT_THROW(parse_map(doc), ParseError);
}

TEST(LoadMap, JsonRoundTrip) {
  const auto map = load_map(brtest::default_map_path());
  const auto again = parse_map(map_to_json(map));
  EXPECT_EQ(map_to_json(again), map_to_json(map));
}

TEST(IsFree, ObstacleCenterIsBlocked) {
  const auto map = load_map(brtest::default_map_path());
  for (const auto& box : map.obstacles()) {
    EXPECT_FALSE(map.is_free(0.5 * (box.min_corner + box.max_corner)));
  }
}

TEST(IsFree, OutsideBoundsIsBlocked) {
  const auto map = open_map();
  EXPECT_FALSE(map.is_free(Vec3(36, 0, -2)));
  EXPECT_FALSE(map.is_free(Vec3(0, 0, 0.5)));
  EXPECT_FALSE(map.is_free(Vec3(0, -6, -2)));
}

TEST(IsFree, MatchesBruteForceContainment) {
  const auto map = load_map(brtest::default_map_path());
  for (double n = -5.0; n <= 35.0; n += 0.05) {
    const Vec3 p(n, 0.0, -4.0);  // centerline
    EXPECT_EQ(map.is_free(p), brute_force_free(map, p)) << "n = " << n;
  }
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5000; ++i) {
    const Vec3 p = random_point(rng, map);
    EXPECT_EQ(map.is_free(p), brute_force_free(map, p));
  }
}

TEST(IsFree, NoObstaclesMeansInBounds) {
  const auto map = open_map();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-12.0, 40.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 p(u(rng), u(rng) / 4.0, u(rng) / 5.0);
    EXPECT_EQ(map.is_free(p), map.in_bounds(p));
  }
}

TEST(SegmentIsFree, DegenerateSegment) {
  const auto map = open_map();
  const Vec3 a(2, 1, -3);
  EXPECT_TRUE(map.segment_is_free(a, a));
}

TEST(SegmentIsFree, EmptyMapSegment) {
  const auto map = open_map();
  EXPECT_TRUE(map.segment_is_free(Vec3(-4, -4, -7), Vec3(34, 4, -1)));
}

TEST(SegmentIsFree, ThroughObstacleCenterAgreesWithDenseOracle) {
  const auto map = load_map(brtest::default_map_path());
  for (const auto& box : map.obstacles()) {
    const Vec3 c = 0.5 * (box.min_corner + box.max_corner);
    const Vec3 half(4.0, 1.0, 0.5);
    const Vec3 a2 = c - half;  // midpoint is the box center
    const Vec3 b2 = c + half;
    EXPECT_FALSE(dense_segment_free(map, a2, b2));
    EXPECT_FALSE(map.segment_is_free(a2, b2));
  }
}

TEST(SegmentIsFree, DenseOracleFreeImpliesFree) {
  const auto map = load_map(brtest::default_map_path());
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const Vec3 a = random_point(rng, map);
    const Vec3 b = a + (random_point(rng, map) - a) * 0.25;
    if (dense_segment_free(map, a, b)) {
      ++checked;
      EXPECT_TRUE(map.segment_is_free(a, b));
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(SegmentIsFree, Properties) {
  const auto map = load_map(brtest::default_map_path());
  const auto thin = map.with_margin(0.05);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 a = random_point(rng, map);
    const Vec3 b = random_point(rng, map);
    const bool free = map.segment_is_free(a, b);
    EXPECT_EQ(free, map.segment_is_free(b, a));
    if (free) {
      EXPECT_TRUE(map.is_free(a));
      EXPECT_TRUE(map.is_free(b));
      EXPECT_TRUE(thin.segment_is_free(a, b));
    }
  }
}

TEST(CameraSees, BelowMountHeightIsHidden) {
  const auto map = open_map();
  EXPECT_FALSE(map.camera_sees(Vec3(2, 0, -0.5)));
}

TEST(CameraSees, WithinRangeAboveMount) {
  const auto map = open_map();
  const Vec3 uav = map.camera_position() + Vec3(3, 0, -2);
  EXPECT_NEAR((uav - map.camera_position()).norm(), std::sqrt(13.0), 1e-12);
  EXPECT_TRUE(map.camera_sees(uav));
}

TEST(CameraSees, RangeGate) {
  const auto map = open_map();
  EXPECT_FALSE(map.camera_sees(Vec3(10, 0, -3)));
}

TEST(CameraSees, OccludedByBox) {
  const auto map = map_with({{Vec3(1.5, -1, -3), Vec3(2, 1, -1)}});
  EXPECT_FALSE(map.camera_sees(Vec3(3, 0, -2)));
  EXPECT_TRUE(map.camera_sees(Vec3(-3, 0, -2)));
}

TEST(LidarSees, AlongPitchedBoresight) {
  const auto map = open_map();
  const double p = map.rig().lidar_pitch;
  const Vec3 uav = map.lidar_position() + 10.0 * Vec3(std::cos(p), 0, -std::sin(p));
  EXPECT_NEAR(map.lidar_elevation(uav), 0.0, 1e-12);
  EXPECT_TRUE(map.lidar_sees(uav));
}

TEST(LidarSees, DirectlyBelowIsOutsideAperture) {
  const auto map = open_map();
  const Vec3 uav = map.lidar_position() + Vec3(0, 0, 0.5);
  EXPECT_FALSE(map.lidar_sees(uav));
}

TEST(LidarSees, BeyondMaxRange) {
  const auto big = EnvironmentMap(Vec3(-5, -5, -30), Vec3(80, 5, 0), {}, {});
  const double p = big.rig().lidar_pitch;
  const Vec3 dir(std::cos(p), 0, -std::sin(p));
  EXPECT_TRUE(big.lidar_sees(big.lidar_position() + 49.0 * dir));
  EXPECT_FALSE(big.lidar_sees(big.lidar_position() + 51.0 * dir));
}

TEST(LidarSees, ElevationMatchesRotatedFrameOracle) {
  const auto map = open_map();
  const double p = map.rig().lidar_pitch;
  std::mt19937_64 rng(9);
  for (int i = 0; i < 500; ++i) {
    const Vec3 uav = random_point(rng, map);
    const Vec3 rel = uav - map.lidar_position();
    // Rotate (forward, up) by -pitch about the East axis.
    const double fwd = rel.x(), up = -rel.z();
    const double fwd2 = fwd * std::cos(p) + up * std::sin(p);
    const double up2 = -fwd * std::sin(p) + up * std::cos(p);
    const double oracle = std::atan2(up2, std::hypot(fwd2, rel.y()));
    EXPECT_NEAR(map.lidar_elevation(uav), oracle, 1e-12);
    EXPECT_EQ(map.lidar_sees(uav),
              std::abs(oracle) <= map.rig().lidar_vertical_halfangle &&
                  rel.norm() <= map.rig().lidar_max_range);
  }
}

TEST(LidarSees, AzimuthUnrestricted) {
  const auto map = open_map();
  // Points on the scan plane at every azimuth.
  const double p = map.rig().lidar_pitch;
  for (int deg = 0; deg < 360; deg += 30) {
    const double az = deg * kDegToRad;
    const Vec3 along(std::cos(az), std::sin(az), 0.0);
    // Lift onto the pitched plane: height = N * tan(pitch).
    const Vec3 rel = 4.0 * along + Vec3(0, 0, -4.0 * std::cos(az) * std::tan(p));
    EXPECT_NEAR(map.lidar_elevation(map.lidar_position() + rel), 0.0, 1e-12);
    EXPECT_TRUE(map.lidar_sees(map.lidar_position() + rel)) << deg;
  }
}

TEST(Visibility, QueriesArePure) {
  const auto map = load_map(brtest::default_map_path());
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p = random_point(rng, map);
    EXPECT_EQ(map.camera_sees(p), map.camera_sees(p));
    EXPECT_EQ(map.lidar_sees(p), map.lidar_sees(p));
  }
}
