#include "beliefroute/roadmap.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

#include "beliefroute/errors.hpp"

namespace beliefroute {
namespace {

// Union-find over node indices.
class Components {
 public:
  explicit Components(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void join(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

bool position_less(const Vec3& a, const Vec3& b) {
  return std::lexicographical_compare(a.data(), a.data() + 3, b.data(),
                                      b.data() + 3);
}

void add_edge(RoadmapGraph& g, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  if (g.find_edge(node_id(i), node_id(j)) >= 0) return;
  g.edges.push_back({node_id(i), node_id(j), (g.nodes[i] - g.nodes[j]).norm(),
                     1});
}

}  // namespace

std::size_t RoadmapGraph::edge_instance_count() const {
  std::size_t total = 0;
  for (const auto& e : edges) total += static_cast<std::size_t>(e.multiplicity);
  return total;
}

double RoadmapGraph::total_length() const {
  double total = 0.0;
  for (const auto& e : edges) total += e.length * e.multiplicity;
  return total;
}

long RoadmapGraph::find_edge(NodeId a, NodeId b) const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) {
      return static_cast<long>(i);
    }
  }
  return -1;
}

std::vector<int> RoadmapGraph::degrees() const {
  std::vector<int> deg(nodes.size(), 0);
  for (const auto& e : edges) {
    deg[index(e.a)] += e.multiplicity;
    deg[index(e.b)] += e.multiplicity;
  }
  return deg;
}

bool RoadmapGraph::is_connected() const {
  if (nodes.empty()) return true;
  Components comps(nodes.size());
  for (const auto& e : edges) {
    if (e.multiplicity > 0) comps.join(index(e.a), index(e.b));
  }
  const std::size_t root = comps.find(0);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (comps.find(i) != root) return false;
  }
  return true;
}

std::vector<Vec3> sample_nodes(const EnvironmentMap& map, std::size_t n,
                               const SamplingOptions& options, Rng& rng) {
  if (n < 2) {
    throw ValidationError(ErrorCategory::kConfig,
                          "sample_nodes: need at least 2 nodes");
  }
  if (!(options.forward_bias >= 1.0)) {
    throw ValidationError(ErrorCategory::kConfig,
                          "sample_nodes: forward bias must be >= 1");
  }
  const Vec3 deploy = map.deploy_position();
  if (!map.is_free(deploy)) {
    throw SamplingExhaustedError(
        "sample_nodes: deployment point next to the UGV is not free");
  }

  std::vector<Vec3> nodes{deploy};
  nodes.reserve(n);

  // Keep waypoints off the walls by the same margin used for obstacles.
  const Vec3 margin = Vec3::Constant(map.collision_margin());
  Vec3 lo = map.bounds_min() + margin;
  Vec3 hi = map.bounds_max() - margin;
  for (int axis = 0; axis < 3; ++axis) {
    if (lo[axis] > hi[axis]) lo[axis] = hi[axis] = 0.5 * (lo[axis] + hi[axis]);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double rear_accept = 1.0 / options.forward_bias;
  const double ugv_north = map.rig().position.x();

  for (std::size_t attempt = 0;
       attempt < options.attempt_budget && nodes.size() < n; ++attempt) {
    Vec3 p;
    for (int axis = 0; axis < 3; ++axis) {
      p[axis] = lo[axis] + unit(rng) * (hi[axis] - lo[axis]);
    }
    const double coin = unit(rng);
    if (p.x() < ugv_north && coin >= rear_accept) continue;
    if (!map.is_free(p)) continue;
    nodes.push_back(p);
  }
  if (nodes.size() < n) {
    throw SamplingExhaustedError(
        "sample_nodes: found only " + std::to_string(nodes.size()) + " of " +
        std::to_string(n) + " free points within " +
        std::to_string(options.attempt_budget) + " attempts");
  }
  return nodes;
}

RoadmapGraph connect_knn(const std::vector<Vec3>& nodes, std::size_t k,
                         const EnvironmentMap& map) {
  if (k < 1) {
    throw ValidationError(ErrorCategory::kConfig, "connect_knn: k must be >= 1");
  }
  RoadmapGraph g;
  g.nodes = nodes;
  g.source = node_id(0);
  const std::size_t n = nodes.size();

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    // Distance, then position, so the neighbour set does not depend on the
    // order the nodes were supplied in.
    std::sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
      const double da = (nodes[a] - nodes[i]).squaredNorm();
      const double db = (nodes[b] - nodes[i]).squaredNorm();
      if (da != db) return da < db;
      return position_less(nodes[a], nodes[b]);
    });
    const std::size_t take = std::min(k, others.size());
    for (std::size_t r = 0; r < take; ++r) {
      const std::size_t j = others[r];
      if (map.segment_is_free(nodes[i], nodes[j])) add_edge(g, i, j);
    }
  }

  // Bridge components with the shortest free cross-component edge.
  while (!g.is_connected()) {
    Components comps(n);
    for (const auto& e : g.edges) comps.join(index(e.a), index(e.b));
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> bridge{0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (comps.find(i) == comps.find(j)) continue;
        const double d = (nodes[i] - nodes[j]).norm();
        if (d < best && map.segment_is_free(nodes[i], nodes[j])) {
          best = d;
          bridge = {i, j};
        }
      }
    }
    if (!std::isfinite(best)) {
      throw DisconnectedGraphError(
          "connect_knn: roadmap is disconnected and no collision-free bridge "
          "exists");
    }
    add_edge(g, bridge.first, bridge.second);
  }
  return g;
}

std::vector<std::size_t> shortest_path_edges(const RoadmapGraph& graph,
                                             NodeId from, NodeId to) {
  const std::size_t n = graph.nodes.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<long> via(n, -1);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[index(from)] = 0.0;
  open.emplace(0.0, index(from));
  while (!open.empty()) {
    auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    for (std::size_t ei = 0; ei < graph.edges.size(); ++ei) {
      const auto& e = graph.edges[ei];
      if (index(e.a) != u && index(e.b) != u) continue;
      const std::size_t v = index(e.other(node_id(u)));
      const double nd = d + e.length;
      if (nd < dist[v]) {
        dist[v] = nd;
        via[v] = static_cast<long>(ei);
        open.emplace(nd, v);
      }
    }
  }
  std::vector<std::size_t> path;
  if (!std::isfinite(dist[index(to)])) return path;
  for (std::size_t v = index(to); v != index(from);) {
    const auto ei = static_cast<std::size_t>(via[v]);
    path.push_back(ei);
    v = index(graph.edges[ei].other(node_id(v)));
  }
  std::reverse(path.begin(), path.end());
  return path;
}

RoadmapGraph eulerize(const RoadmapGraph& graph, const EnvironmentMap& map) {
  if (!graph.is_connected()) {
    throw DisconnectedGraphError("eulerize: graph must be connected");
  }
  RoadmapGraph out = graph;
  const auto deg = graph.degrees();
  std::vector<std::size_t> odd;
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] % 2 != 0) odd.push_back(i);
  }
  if (odd.empty()) return out;

  struct Candidate {
    double cost;
    std::size_t u;
    std::size_t v;
    bool direct;
  };
  std::vector<Candidate> candidates;
  for (std::size_t a = 0; a < odd.size(); ++a) {
    for (std::size_t b = a + 1; b < odd.size(); ++b) {
      const std::size_t u = odd[a];
      const std::size_t v = odd[b];
      const bool adjacent = graph.find_edge(node_id(u), node_id(v)) >= 0;
      if (!adjacent && map.segment_is_free(graph.nodes[u], graph.nodes[v])) {
        candidates.push_back({(graph.nodes[u] - graph.nodes[v]).norm(), u, v,
                              true});
        continue;
      }
      double cost = 0.0;
      for (auto ei : shortest_path_edges(graph, node_id(u), node_id(v))) {
        cost += graph.edges[ei].length;
      }
      candidates.push_back({cost, u, v, false});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              return std::tie(x.cost, x.u, x.v) < std::tie(y.cost, y.u, y.v);
            });

  std::vector<bool> matched(graph.nodes.size(), false);
  for (const auto& c : candidates) {
    if (matched[c.u] || matched[c.v]) continue;
    matched[c.u] = matched[c.v] = true;
    if (c.direct) {
      out.edges.push_back({node_id(c.u), node_id(c.v), c.cost, 1});
    } else {
      // Paths are computed on the input graph; direct edges added above are
      // never part of them.
      for (auto ei : shortest_path_edges(graph, node_id(c.u), node_id(c.v))) {
        out.edges[ei].multiplicity += 1;
      }
    }
  }
  return out;
}

std::vector<std::pair<NodeId, int>> degree_profile(const RoadmapGraph& graph) {
  const auto deg = graph.degrees();
  std::vector<std::pair<NodeId, int>> out;
  out.reserve(deg.size());
  for (std::size_t i = 0; i < deg.size(); ++i) out.emplace_back(node_id(i), deg[i]);
  return out;
}

nlohmann::json graph_to_json(const RoadmapGraph& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& p : graph.nodes) nodes.push_back({p.x(), p.y(), p.z()});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : graph.edges) {
    edges.push_back({index(e.a), index(e.b), e.length, e.multiplicity});
  }
  return {{"nodes", nodes},
          {"edges", edges},
          {"source", index(graph.source)},
          {"edge_instances", graph.edge_instance_count()},
          {"total_length_m", graph.total_length()}};
}

RoadmapGraph graph_from_json(const nlohmann::json& doc) {
  RoadmapGraph g;
  try {
    for (const auto& p : doc.at("nodes")) {
      g.nodes.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                           p.at(2).get<double>());
    }
    for (const auto& e : doc.at("edges")) {
      const auto a = e.at(0).get<std::size_t>();
      const auto b = e.at(1).get<std::size_t>();
      if (a >= g.nodes.size() || b >= g.nodes.size() || a == b) {
        throw ValidationError(ErrorCategory::kArtifact,
                              "graph: edge endpoints out of range");
      }
      g.edges.push_back({node_id(a), node_id(b), e.at(2).get<double>(),
                         e.at(3).get<int>()});
    }
    const auto src = doc.at("source").get<std::size_t>();
    if (src >= g.nodes.size()) {
      throw ValidationError(ErrorCategory::kArtifact,
                            "graph: source index out of range");
    }
    g.source = node_id(src);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ErrorCategory::kArtifact,
                     std::string("graph: malformed document: ") + e.what());
  }
  return g;
}

}  // namespace beliefroute
