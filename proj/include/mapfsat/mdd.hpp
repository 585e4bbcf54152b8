#pragma once

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mapfsat/instance.hpp"

namespace mapfsat {

struct GoalUnreachable : std::runtime_error {
  int agent;
  explicit GoalUnreachable(int a)
      : std::runtime_error("goal unreachable for a" + std::to_string(a + 1)),
        agent(a) {}
};

// BFS hop distances from one source; -1 marks unreachable vertices.
inline std::vector<int> bfs_from(const Graph& g, int source) {
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : g.neighbors(u))
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

// Distances from an agent's start and to its goal (undirected graph, so
// the latter is a BFS from the goal).
struct AgentDistances {
  std::vector<int> from_start;
  std::vector<int> to_goal;

  int shortest(const MapfInstance& inst, int agent) const {
    return from_start[inst.goal[agent]];
  }
};

inline AgentDistances bfs_distances(const MapfInstance& inst, int agent) {
  AgentDistances d;
  d.from_start = bfs_from(inst.graph, inst.start[agent]);
  d.to_goal = bfs_from(inst.graph, inst.goal[agent]);
  if (d.to_goal[inst.start[agent]] < 0) throw GoalUnreachable(agent);
  return d;
}

using DistanceTable = std::vector<AgentDistances>;

inline DistanceTable all_distances(const MapfInstance& inst) {
  DistanceTable table;
  for (int a = 0; a < inst.agent_count(); ++a)
    table.push_back(bfs_distances(inst, a));
  return table;
}

// xi_0: sum of individual shortest-path lengths, the sum-of-costs lower
// bound that seeds the outer optimization loop.
inline int sum_of_costs_lower_bound(const MapfInstance& inst) {
  int total = 0;
  for (int a = 0; a < inst.agent_count(); ++a)
    total += bfs_distances(inst, a).shortest(inst, a);
  return total;
}

inline int sum_of_costs_lower_bound(const MapfInstance& inst,
                                    const DistanceTable& dists) {
  int total = 0;
  for (int a = 0; a < inst.agent_count(); ++a)
    total += dists[a].shortest(inst, a);
  return total;
}

// Per-agent time-expanded graph pruned under the cost budget.
//
// A node (v, t) is kept iff v is reachable from the start within t steps
// and the goal is still reachable within the agent's individual budget
// mu = dist(start, goal) + delta, i.e. t + dist(v, goal) <= mu. Layers
// beyond mu up to the shared horizon T hold only the goal vertex, so all
// agents' diagrams align for the collision constraints; the padding arcs
// are waits at the goal.
struct Mdd {
  int agent = 0;
  int depth = 0;    // mu: individual cost budget in timesteps
  int horizon = 0;  // T: shared last timestep, layers run 0..T
  std::vector<std::vector<int>> layers;  // sorted vertex ids per timestep
  std::vector<std::vector<std::pair<int, int>>> arcs;  // arcs[t]: (u,v) sorted

  bool has_node(int t, int v) const {
    if (t < 0 || t > horizon) return false;
    const auto& layer = layers[t];
    return std::binary_search(layer.begin(), layer.end(), v);
  }
  size_t node_count() const {
    size_t n = 0;
    for (const auto& l : layers) n += l.size();
    return n;
  }
  size_t arc_count() const {
    size_t n = 0;
    for (const auto& a : arcs) n += a.size();
    return n;
  }
};

inline Mdd build_mdd(const MapfInstance& inst, const DistanceTable& dists,
                     int agent, int delta, int horizon) {
  if (delta < 0) throw std::invalid_argument("build_mdd: negative delta");
  const Graph& g = inst.graph;
  const AgentDistances& d = dists[agent];
  const int goal = inst.goal[agent];
  const int mu = d.shortest(inst, agent) + delta;

  Mdd mdd;
  mdd.agent = agent;
  mdd.depth = mu;
  mdd.horizon = horizon;
  mdd.layers.resize(horizon + 1);
  mdd.arcs.resize(horizon);

  for (int t = 0; t <= horizon; ++t) {
    auto& layer = mdd.layers[t];
    for (int v = 0; v < g.vertex_count(); ++v) {
      if (d.from_start[v] < 0 || d.to_goal[v] < 0) continue;
      if (d.from_start[v] > t) continue;
      if (t + d.to_goal[v] <= mu || v == goal) layer.push_back(v);
    }
  }
  for (int t = 0; t < horizon; ++t) {
    for (int u : mdd.layers[t]) {
      if (mdd.has_node(t + 1, u)) mdd.arcs[t].emplace_back(u, u);
      for (int v : g.neighbors(u))
        if (mdd.has_node(t + 1, v)) mdd.arcs[t].emplace_back(u, v);
    }
    std::sort(mdd.arcs[t].begin(), mdd.arcs[t].end());
  }
  return mdd;
}

// Convenience: single-agent build computing distances and the shared
// horizon internally.
inline Mdd build_mdd(const MapfInstance& inst, int agent, int delta) {
  DistanceTable dists = all_distances(inst);
  int max_dist = 0;
  for (int a = 0; a < inst.agent_count(); ++a)
    max_dist = std::max(max_dist, dists[a].shortest(inst, a));
  return build_mdd(inst, dists, agent, delta, max_dist + delta);
}

inline std::vector<Mdd> build_mdds(const MapfInstance& inst,
                                   const DistanceTable& dists, int delta) {
  int max_dist = 0;
  for (int a = 0; a < inst.agent_count(); ++a)
    max_dist = std::max(max_dist, dists[a].shortest(inst, a));
  std::vector<Mdd> mdds;
  for (int a = 0; a < inst.agent_count(); ++a)
    mdds.push_back(build_mdd(inst, dists, a, delta, max_dist + delta));
  return mdds;
}

inline std::vector<Mdd> build_mdds(const MapfInstance& inst, int delta) {
  return build_mdds(inst, all_distances(inst), delta);
}

// DOT rendering for debugging; one rank per timestep.
inline std::string mdd_to_dot(const Mdd& mdd) {
  std::ostringstream out;
  out << "digraph mdd_a" << mdd.agent + 1 << " {\n  rankdir=TB;\n";
  for (int t = 0; t <= mdd.horizon; ++t) {
    out << "  { rank=same;";
    for (int v : mdd.layers[t]) out << " n" << t << "_" << v;
    out << " }\n";
    for (int v : mdd.layers[t])
      out << "  n" << t << "_" << v << " [label=\"v" << v << "@t" << t
          << "\"];\n";
  }
  for (int t = 0; t < mdd.horizon; ++t)
    for (auto [u, v] : mdd.arcs[t])
      out << "  n" << t << "_" << u << " -> n" << t + 1 << "_" << v << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace mapfsat
