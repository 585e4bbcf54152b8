#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "mapfsat/solution.hpp"

namespace mapfsat {

// Brute-force optimum over the joint configuration space, independent of
// the MDD/SAT pipeline. A state is (configuration, settled-mask); an agent
// may settle once it sits on its goal, after which it never moves again
// and stops accruing cost. Each joint step costs the number of agents not
// yet settled, which realizes the sum-of-costs convention exactly
// (trailing waits at the goal are free, earlier waits are not).
struct OracleResult {
  bool solvable = false;
  bool exhausted_cap = false;  // state cap hit before a verdict
  int optimal_soc = -1;
  uint64_t states_expanded = 0;
  std::optional<Solution> witness;
};

inline OracleResult joint_state_optimum(const MapfInstance& inst,
                                        uint64_t state_cap = 20'000'000,
                                        bool want_witness = false) {
  OracleResult result;
  const int k = inst.agent_count();
  const Graph& g = inst.graph;

  struct State {
    Configuration pos;
    uint32_t settled;
    bool operator<(const State& o) const {
      return settled != o.settled ? settled < o.settled : pos < o.pos;
    }
  };
  const uint32_t all_settled = (k >= 32) ? ~0u : ((1u << k) - 1);

  std::map<State, int> dist;
  std::map<State, State> parent;
  using QueueItem = std::pair<int, State>;
  std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;

  auto push = [&](const State& s, int d, const State* from) {
    auto it = dist.find(s);
    if (it != dist.end() && it->second <= d) return;
    dist[s] = d;
    if (want_witness && from) parent.insert_or_assign(s, *from);
    queue.emplace(d, s);
  };

  // Any subset of agents already on their goals may settle immediately.
  {
    uint32_t at_goal = 0;
    for (int i = 0; i < k; ++i)
      if (inst.start[i] == inst.goal[i]) at_goal |= 1u << i;
    for (uint32_t sub = at_goal;; sub = (sub - 1) & at_goal) {
      push(State{inst.start, sub}, 0, nullptr);
      if (sub == 0) break;
    }
  }

  std::optional<State> goal_state;
  while (!queue.empty()) {
    auto [d, s] = queue.top();
    queue.pop();
    auto it = dist.find(s);
    if (it == dist.end() || it->second != d) continue;
    if (s.settled == all_settled) {
      result.solvable = true;
      result.optimal_soc = d;
      goal_state = s;
      break;
    }
    if (++result.states_expanded > state_cap) {
      result.exhausted_cap = true;
      return result;
    }

    const int step_cost = k - __builtin_popcount(s.settled);

    // Enumerate joint moves agent by agent; unsettled agents wait or move,
    // settled agents stay. Vertex and swap conflicts pruned as we go.
    Configuration next(k, -1);
    auto expand = [&](auto&& self, int agent) -> void {
      if (agent == k) {
        uint32_t at_goal = 0;
        for (int i = 0; i < k; ++i)
          if (!(s.settled & (1u << i)) && next[i] == inst.goal[i])
            at_goal |= 1u << i;
        for (uint32_t sub = at_goal;; sub = (sub - 1) & at_goal) {
          push(State{next, s.settled | sub}, d + step_cost, &s);
          if (sub == 0) break;
        }
        return;
      }
      auto try_target = [&](int v) {
        for (int j = 0; j < agent; ++j) {
          if (next[j] == v) return;  // two agents entering one vertex
          if (next[j] == s.pos[agent] && s.pos[j] == v) return;  // swap
        }
        next[agent] = v;
        self(self, agent + 1);
        next[agent] = -1;
      };
      if (s.settled & (1u << agent)) {
        try_target(s.pos[agent]);
        return;
      }
      try_target(s.pos[agent]);
      for (int v : g.neighbors(s.pos[agent])) try_target(v);
    };
    expand(expand, 0);
  }

  if (result.solvable && want_witness && goal_state) {
    std::vector<Configuration> configs;
    State cur = *goal_state;
    for (;;) {
      configs.push_back(cur.pos);
      auto it = parent.find(cur);
      if (it == parent.end()) break;
      cur = it->second;
    }
    std::reverse(configs.begin(), configs.end());
    Solution sol;
    sol.paths.assign(k, {});
    for (const auto& c : configs)
      for (int i = 0; i < k; ++i) sol.paths[i].push_back(c[i]);
    result.witness = std::move(sol);
  }
  return result;
}

}  // namespace mapfsat
