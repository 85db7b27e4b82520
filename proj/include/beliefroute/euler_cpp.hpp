#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "beliefroute/random.hpp"
#include "beliefroute/roadmap.hpp"

namespace beliefroute {

/// One traversal of one copy of a multigraph edge.
struct EdgeRef {
  std::size_t edge = 0;  // index into RoadmapGraph::edges
  int copy = 0;          // 0 .. multiplicity-1

  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

/// Closed coverage walk starting and ending at the graph source.
struct Circuit {
  std::size_t run_index = 0;
  std::vector<NodeId> nodes;       // first == last == source
  std::vector<EdgeRef> edge_refs;  // edge_refs[i] joins nodes[i], nodes[i+1]
  double length = 0.0;             // meters
  double flight_time = 0.0;        // seconds at the cruise speed
  bool duplicate = false;          // same sequence as an earlier run
};

/// Randomized Hierholzer: walk uniformly over unused incident edge copies
/// until stuck at the start, then repeatedly grow a sub-circuit from a random
/// vertex that still has unused edges and splice it in at that vertex's first
/// occurrence in the trail. Throws NotEulerianError on odd degrees or a
/// disconnected edge set.
Circuit random_euler_circuit(const RoadmapGraph& graph, Rng& rng,
                             double cruise = 0.5);

/// `count` independent circuits; run r draws from its own stream derived from
/// `seed`, so results do not depend on evaluation order.
std::vector<Circuit> generate_candidates(const RoadmapGraph& graph,
                                         std::size_t count, std::uint64_t seed,
                                         double cruise = 0.5);

std::vector<Circuit> filter_by_flight_time(const std::vector<Circuit>& circuits,
                                           double rho, double cruise);

/// Throws InvalidCircuitError unless the circuit is a closed walk over
/// `graph` that starts at the source and only uses existing edge copies.
void validate_circuit(const Circuit& circuit, const RoadmapGraph& graph);

nlohmann::json circuits_to_json(const std::vector<Circuit>& circuits);
std::vector<Circuit> circuits_from_json(const nlohmann::json& doc);

}  // namespace beliefroute
