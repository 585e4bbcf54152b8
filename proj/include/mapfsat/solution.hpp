#pragma once

#include <compare>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mapfsat/instance.hpp"

namespace mapfsat {

// A full solution: one path per agent, all padded to a common horizon T,
// so paths[a][t] is agent a's vertex at timestep t (0 <= t <= T).
struct Solution {
  std::vector<std::vector<int>> paths;

  int horizon() const {
    return paths.empty() ? 0 : static_cast<int>(paths[0].size()) - 1;
  }
  int agent_count() const { return static_cast<int>(paths.size()); }
};

// Partial per-agent paths with gaps; kNoVertex marks an undecided position.
// Produced from partial SAT assignments, consumed by the consistency check.
constexpr int kNoVertex = -1;

struct PartialPaths {
  std::vector<std::vector<int>> at;  // at[agent][t] is a vertex id or kNoVertex

  int horizon() const {
    return at.empty() ? 0 : static_cast<int>(at[0].size()) - 1;
  }
  int agent_count() const { return static_cast<int>(at.size()); }
};

// A MAPF rule violation between two agents. For Vertex conflicts the
// location is a single vertex (u == v); for Swap conflicts (u, v) is the
// edge as traversed by the lower-indexed agent. Always a < b.
struct Conflict {
  enum class Kind { Vertex, Swap };

  Kind kind;
  int a, b;
  int u, v;
  int t;

  static Conflict vertex(int ai, int aj, int where, int time) {
    if (ai > aj) std::swap(ai, aj);
    return Conflict{Kind::Vertex, ai, aj, where, where, time};
  }
  // from/to describe agent ai's traversal; canonicalized so a < b.
  static Conflict swap(int ai, int aj, int from, int to, int time) {
    if (ai > aj) {
      std::swap(ai, aj);
      std::swap(from, to);
    }
    return Conflict{Kind::Swap, ai, aj, from, to, time};
  }

  auto key() const { return std::tie(kind, a, b, u, v, t); }
  bool operator==(const Conflict& o) const { return key() == o.key(); }
  bool operator<(const Conflict& o) const { return key() < o.key(); }

  std::string str() const {
    std::ostringstream out;
    if (kind == Kind::Vertex)
      out << "vertex(a" << a + 1 << ",a" << b + 1 << ",v=" << u << ",t=" << t
          << ")";
    else
      out << "swap(a" << a + 1 << ",a" << b + 1 << ",(" << u << "," << v
          << "),t=" << t << ")";
    return out.str();
  }
};

// Outcome of a consistency check. Structural errors (non-adjacent steps)
// are reported separately from agent-pair conflicts.
struct ConsistencyReport {
  std::vector<Conflict> conflicts;
  std::vector<std::string> structural_errors;

  bool consistent() const {
    return conflicts.empty() && structural_errors.empty();
  }
};

namespace detail {

// Shared scan over positions[agent][t] where kNoVertex entries are skipped.
// Reports every vertex conflict (two agents in one vertex at one t) and
// every swap conflict (two agents exchanging the endpoints of an edge
// between t and t+1), plus structural errors for defined consecutive
// positions that are neither equal nor adjacent.
inline ConsistencyReport check_positions(
    const std::vector<std::vector<int>>& pos, const MapfInstance& inst) {
  ConsistencyReport report;
  const int k = static_cast<int>(pos.size());
  int horizon = 0;
  for (const auto& p : pos)
    horizon = std::max(horizon, static_cast<int>(p.size()) - 1);

  auto at = [&](int agent, int t) -> int {
    const auto& p = pos[agent];
    return t < static_cast<int>(p.size()) ? p[t] : kNoVertex;
  };

  for (int a = 0; a < k; ++a) {
    for (int t = 0; t + 1 <= horizon; ++t) {
      int u = at(a, t), v = at(a, t + 1);
      if (u == kNoVertex || v == kNoVertex) continue;
      if (u != v && !inst.graph.adjacent(u, v)) {
        std::ostringstream out;
        out << "a" << a + 1 << " jumps " << u << "->" << v << " at t=" << t;
        report.structural_errors.push_back(out.str());
      }
    }
  }

  for (int t = 0; t <= horizon; ++t) {
    for (int i = 0; i < k; ++i) {
      int ui = at(i, t);
      if (ui == kNoVertex) continue;
      for (int j = i + 1; j < k; ++j) {
        int uj = at(j, t);
        if (uj == kNoVertex) continue;
        if (ui == uj) report.conflicts.push_back(Conflict::vertex(i, j, ui, t));
        if (t == horizon) continue;
        int vi = at(i, t + 1), vj = at(j, t + 1);
        if (vi == kNoVertex || vj == kNoVertex) continue;
        if (ui != vi && vi == uj && vj == ui)
          report.conflicts.push_back(Conflict::swap(i, j, ui, vi, t));
      }
    }
  }
  return report;
}

}  // namespace detail

// DECIDE_MAPF: finds all vertex and swap conflicts in a full solution.
inline ConsistencyReport check_consistency(const Solution& sol,
                                           const MapfInstance& inst) {
  return detail::check_positions(sol.paths, inst);
}

// Partial-assignment variant: only pairs of positions that are both
// defined at a timestep can conflict.
inline ConsistencyReport check_consistency(const PartialPaths& partial,
                                           const MapfInstance& inst) {
  return detail::check_positions(partial.at, inst);
}

// True iff the paths satisfy start/goal boundary conditions, every step is
// a wait or an edge move, and no vertex/swap conflict occurs.
inline bool is_valid_solution(const Solution& sol, const MapfInstance& inst) {
  if (sol.agent_count() != inst.agent_count()) return false;
  const int T = sol.horizon();
  for (int a = 0; a < sol.agent_count(); ++a) {
    const auto& p = sol.paths[a];
    if (static_cast<int>(p.size()) != T + 1) return false;
    if (p.front() != inst.start[a] || p.back() != inst.goal[a]) return false;
    for (int v : p)
      if (!inst.graph.valid_vertex(v)) return false;
  }
  return check_consistency(sol, inst).consistent();
}

// Individual path cost: number of move/wait actions before the agent
// reaches its goal for the last time. Trailing waits at the goal are free;
// a wait at the goal followed by later movement counts.
inline int path_cost(const std::vector<int>& path) {
  if (path.empty()) return 0;
  const int goal = path.back();
  int last_away = -1;
  for (int t = 0; t < static_cast<int>(path.size()); ++t)
    if (path[t] != goal) last_away = t;
  return last_away + 1;
}

// Total move/wait actions over all agents before each settles at its goal.
inline int sum_of_costs(const Solution& sol) {
  int total = 0;
  for (const auto& p : sol.paths) total += path_cost(p);
  return total;
}

// Time until the last agent is permanently at its goal.
inline int makespan(const Solution& sol) {
  int m = 0;
  for (const auto& p : sol.paths) m = std::max(m, path_cost(p));
  return m;
}

}  // namespace mapfsat
