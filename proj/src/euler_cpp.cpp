#include "beliefroute/euler_cpp.hpp"

#include <algorithm>
#include <set>

#include "beliefroute/errors.hpp"

namespace beliefroute {
namespace {

struct Instance {
  std::size_t edge;
  int copy;
  NodeId a;
  NodeId b;
};

void check_eulerian(const RoadmapGraph& graph) {
  const auto deg = graph.degrees();
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] % 2 != 0) {
      throw NotEulerianError("euler: node " + std::to_string(i) +
                             " has odd degree " + std::to_string(deg[i]));
    }
  }
  // Every node carrying edges must be reachable from the source.
  std::vector<std::vector<std::size_t>> adj(graph.nodes.size());
  for (const auto& e : graph.edges) {
    if (e.multiplicity <= 0) continue;
    adj[index(e.a)].push_back(index(e.b));
    adj[index(e.b)].push_back(index(e.a));
  }
  std::vector<bool> seen(graph.nodes.size(), false);
  std::vector<std::size_t> stack{index(graph.source)};
  seen[index(graph.source)] = true;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] > 0 && !seen[i]) {
      throw NotEulerianError("euler: node " + std::to_string(i) +
                             " is not connected to the source");
    }
  }
}

}  // namespace

Circuit random_euler_circuit(const RoadmapGraph& graph, Rng& rng,
                             double cruise) {
  if (graph.nodes.empty()) throw NotEulerianError("euler: empty graph");
  check_eulerian(graph);

  std::vector<Instance> instances;
  std::vector<std::vector<std::size_t>> incident(graph.nodes.size());
  for (std::size_t ei = 0; ei < graph.edges.size(); ++ei) {
    const auto& e = graph.edges[ei];
    for (int c = 0; c < e.multiplicity; ++c) {
      incident[index(e.a)].push_back(instances.size());
      incident[index(e.b)].push_back(instances.size());
      instances.push_back({ei, c, e.a, e.b});
    }
  }
  std::vector<bool> used(instances.size(), false);
  std::vector<std::size_t> unused_count(graph.nodes.size());
  for (std::size_t i = 0; i < incident.size(); ++i) {
    unused_count[i] = incident[i].size();
  }

  // Random walk from `start` until no unused edge copy remains at the current
  // vertex. On an even-degree graph that vertex is `start` again.
  auto walk = [&](NodeId start, std::vector<NodeId>& nodes,
                  std::vector<std::size_t>& steps) {
    nodes.assign(1, start);
    steps.clear();
    NodeId at = start;
    std::vector<std::size_t> options;
    while (unused_count[index(at)] > 0) {
      options.clear();
      for (auto inst : incident[index(at)]) {
        if (!used[inst]) options.push_back(inst);
      }
      std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
      const auto inst = options[pick(rng)];
      used[inst] = true;
      --unused_count[index(instances[inst].a)];
      --unused_count[index(instances[inst].b)];
      at = instances[inst].a == at ? instances[inst].b : instances[inst].a;
      nodes.push_back(at);
      steps.push_back(inst);
    }
  };

  std::vector<NodeId> trail;
  std::vector<std::size_t> trail_steps;
  walk(graph.source, trail, trail_steps);

  std::vector<NodeId> sub;
  std::vector<std::size_t> sub_steps;
  for (;;) {
    // Candidates are trail vertices that still have unused edges; by
    // connectivity one exists whenever edges remain.
    std::vector<NodeId> pending;
    std::vector<bool> listed(graph.nodes.size(), false);
    for (auto n : trail) {
      if (unused_count[index(n)] > 0 && !listed[index(n)]) {
        listed[index(n)] = true;
        pending.push_back(n);
      }
    }
    if (pending.empty()) break;
    std::sort(pending.begin(), pending.end());
    std::uniform_int_distribution<std::size_t> pick(0, pending.size() - 1);
    const NodeId start = pending[pick(rng)];
    const auto at = std::find(trail.begin(), trail.end(), start);
    walk(start, sub, sub_steps);
    const auto pos = static_cast<std::size_t>(at - trail.begin());
    // Replace trail[pos] with the sub-circuit (which starts and ends there).
    trail.insert(trail.begin() + static_cast<long>(pos) + 1, sub.begin() + 1,
                 sub.end());
    trail_steps.insert(trail_steps.begin() + static_cast<long>(pos),
                       sub_steps.begin(), sub_steps.end());
  }

  if (trail_steps.size() != instances.size()) {
    throw NotEulerianError("euler: edges unreachable from the source remain");
  }

  Circuit c;
  c.nodes = std::move(trail);
  c.edge_refs.reserve(trail_steps.size());
  for (auto inst : trail_steps) {
    c.edge_refs.push_back({instances[inst].edge, instances[inst].copy});
    c.length += graph.edges[instances[inst].edge].length;
  }
  c.flight_time = c.length / cruise;
  return c;
}

std::vector<Circuit> generate_candidates(const RoadmapGraph& graph,
                                         std::size_t count, std::uint64_t seed,
                                         double cruise) {
  std::vector<Circuit> out;
  out.reserve(count);
  std::set<std::vector<NodeId>> seen;
  for (std::size_t run = 0; run < count; ++run) {
    Rng rng(derive_seed(seed, kStreamCircuits, run));
    Circuit c = random_euler_circuit(graph, rng, cruise);
    c.run_index = run;
    // Walks over parallel copies of one edge are indistinguishable in flight,
    // so duplicates are judged on the node sequence.
    c.duplicate = !seen.insert(c.nodes).second;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Circuit> filter_by_flight_time(const std::vector<Circuit>& circuits,
                                           double rho, double cruise) {
  if (!(rho > 0.0) || !(cruise > 0.0)) {
    throw ValidationError(ErrorCategory::kConfig,
                          "filter_by_flight_time: rho and cruise must be > 0");
  }
  std::vector<Circuit> out;
  for (const auto& c : circuits) {
    if (c.length / cruise < rho) out.push_back(c);
  }
  return out;
}

void validate_circuit(const Circuit& circuit, const RoadmapGraph& graph) {
  auto fail = [](const std::string& why) {
    throw InvalidCircuitError("circuit: " + why);
  };
  if (circuit.nodes.empty()) fail("no nodes");
  if (circuit.nodes.front() != graph.source) fail("does not start at source");
  if (circuit.nodes.back() != graph.source) fail("does not end at source");
  if (circuit.edge_refs.size() + 1 != circuit.nodes.size()) {
    fail("edge and node counts disagree");
  }
  for (std::size_t i = 0; i < circuit.edge_refs.size(); ++i) {
    const auto& ref = circuit.edge_refs[i];
    if (ref.edge >= graph.edges.size()) fail("edge index out of range");
    const auto& e = graph.edges[ref.edge];
    if (ref.copy < 0 || ref.copy >= e.multiplicity) fail("bad edge copy");
    const NodeId u = circuit.nodes[i];
    const NodeId v = circuit.nodes[i + 1];
    if (!((e.a == u && e.b == v) || (e.a == v && e.b == u))) {
      fail("step " + std::to_string(i) + " does not follow its edge");
    }
  }
  for (auto n : circuit.nodes) {
    if (index(n) >= graph.nodes.size()) fail("node index out of range");
  }
}

nlohmann::json circuits_to_json(const std::vector<Circuit>& circuits) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : circuits) {
    nlohmann::json nodes = nlohmann::json::array();
    for (auto n : c.nodes) nodes.push_back(index(n));
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& r : c.edge_refs) edges.push_back({r.edge, r.copy});
    arr.push_back({{"run", c.run_index},
                   {"nodes", nodes},
                   {"edges", edges},
                   {"length_m", c.length},
                   {"flight_time_s", c.flight_time},
                   {"duplicate", c.duplicate}});
  }
  return arr;
}

std::vector<Circuit> circuits_from_json(const nlohmann::json& doc) {
  std::vector<Circuit> out;
  try {
    for (const auto& item : doc) {
      Circuit c;
      c.run_index = item.at("run").get<std::size_t>();
      for (const auto& n : item.at("nodes")) {
        c.nodes.push_back(node_id(n.get<std::size_t>()));
      }
      for (const auto& r : item.at("edges")) {
        c.edge_refs.push_back({r.at(0).get<std::size_t>(), r.at(1).get<int>()});
      }
      c.length = item.at("length_m").get<double>();
      c.flight_time = item.at("flight_time_s").get<double>();
      c.duplicate = item.at("duplicate").get<bool>();
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ErrorCategory::kArtifact,
                     std::string("circuits: malformed document: ") + e.what());
  }
  return out;
}

}  // namespace beliefroute
