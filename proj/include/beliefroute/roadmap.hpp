#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "beliefroute/map_env.hpp"
#include "beliefroute/random.hpp"

namespace beliefroute {

enum class NodeId : std::uint32_t {};

constexpr std::size_t index(NodeId id) { return static_cast<std::size_t>(id); }
constexpr NodeId node_id(std::size_t i) {
  return static_cast<NodeId>(static_cast<std::uint32_t>(i));
}

/// Undirected edge; `multiplicity` copies are traversed by a circuit.
struct Edge {
  NodeId a;
  NodeId b;
  double length = 0.0;
  int multiplicity = 1;

  NodeId other(NodeId n) const { return n == a ? b : a; }
};

/// Undirected multigraph of waypoints. Parallel copies of one node pair are
/// stored once with a multiplicity.
struct RoadmapGraph {
  std::vector<Vec3> nodes;
  std::vector<Edge> edges;
  NodeId source{};

  std::size_t edge_instance_count() const;
  double total_length() const;  // counting multiplicity
  /// Index of the edge joining a and b, or -1.
  long find_edge(NodeId a, NodeId b) const;
  std::vector<int> degrees() const;
  bool is_connected() const;
};

struct SamplingOptions {
  double forward_bias = 3.0;  // forward:rear acceptance ratio
  std::size_t attempt_budget = 10'000;
};

/// Collision-free waypoints. Element 0 is the deployment point beside the
/// UGV. Points behind the UGV (N below the rig) are accepted with
/// probability 1 / forward_bias.
std::vector<Vec3> sample_nodes(const EnvironmentMap& map, std::size_t n,
                               const SamplingOptions& options, Rng& rng);

/// k-nearest-neighbour roadmap over `nodes`; node 0 becomes the source.
/// Disconnected results are bridged between components with the shortest
/// free edge.
RoadmapGraph connect_knn(const std::vector<Vec3>& nodes, std::size_t k,
                         const EnvironmentMap& map);

/// Makes every degree even. Odd nodes are paired greedily by the cheapest
/// fix: a new free edge when the pair is nonadjacent, otherwise duplicated
/// edges along a shortest path.
RoadmapGraph eulerize(const RoadmapGraph& graph, const EnvironmentMap& map);

std::vector<std::pair<NodeId, int>> degree_profile(const RoadmapGraph& graph);

/// Shortest path (by length) between two nodes as a list of edge indices.
std::vector<std::size_t> shortest_path_edges(const RoadmapGraph& graph,
                                             NodeId from, NodeId to);

nlohmann::json graph_to_json(const RoadmapGraph& graph);
RoadmapGraph graph_from_json(const nlohmann::json& doc);

}  // namespace beliefroute
