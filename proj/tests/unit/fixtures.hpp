#pragma once

#include <filesystem>
#include <random>
#include <utility>
#include <vector>

#include "beliefroute/map_env.hpp"
#include "beliefroute/roadmap.hpp"

namespace brtest {

using beliefroute::EnvironmentMap;
using beliefroute::RoadmapGraph;
using beliefroute::Vec3;

inline std::filesystem::path source_dir() { return BELIEFROUTE_SOURCE_DIR; }

inline std::filesystem::path default_map_path() {
  return source_dir() / "data" / "tunnel_default.json";
}

inline std::filesystem::path default_config_path() {
  return source_dir() / "config" / "default.json";
}

// Same extent as the default tunnel, no obstacles.
inline EnvironmentMap open_map(double margin = 0.3) {
  return EnvironmentMap(Vec3(-5, -5, -8), Vec3(35, 5, 0), {}, {}, margin);
}

inline EnvironmentMap map_with(std::vector<beliefroute::BoxObstacle> boxes,
                               double margin = 0.3) {
  return EnvironmentMap(Vec3(-5, -5, -8), Vec3(35, 5, 0), std::move(boxes), {},
                        margin);
}

// Graph over explicit positions; node 0 is the source.
inline RoadmapGraph make_graph(std::vector<Vec3> nodes,
                               const std::vector<std::pair<int, int>>& edges,
                               const std::vector<int>& multiplicity = {}) {
  RoadmapGraph g;
  g.nodes = std::move(nodes);
  g.source = beliefroute::node_id(0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto [a, b] = edges[i];
    beliefroute::Edge e{beliefroute::node_id(a), beliefroute::node_id(b),
                        (g.nodes[a] - g.nodes[b]).norm(),
                        multiplicity.empty() ? 1 : multiplicity[i]};
    g.edges.push_back(e);
  }
  return g;
}

// Random connected, Eulerized roadmap over `n` free points of an open map.
inline RoadmapGraph random_eulerian_graph(std::mt19937_64& rng, std::size_t n,
                                          const EnvironmentMap& map) {
  std::uniform_real_distribution<double> un(-4.0, 34.0), ue(-4.0, 4.0),
      ud(-7.0, -1.0);
  std::uniform_int_distribution<std::size_t> uk(1, 5);
  std::vector<Vec3> nodes{map.deploy_position()};
  while (nodes.size() < n) nodes.emplace_back(un(rng), ue(rng), ud(rng));
  const auto g = beliefroute::connect_knn(nodes, uk(rng), map);
  return beliefroute::eulerize(g, map);
}

}  // namespace brtest
