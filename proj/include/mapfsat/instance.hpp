#pragma once

#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mapfsat/graph.hpp"

namespace mapfsat {

// Placement of all agents at one timestep; positions[a] is agent a's vertex.
using Configuration = std::vector<int>;

// A MAPF instance: undirected graph, k agents, start and goal configurations.
// Agents are indexed 0..k-1 internally; display output uses a1..ak.
struct MapfInstance {
  Graph graph;
  Configuration start;
  Configuration goal;

  int agent_count() const { return static_cast<int>(start.size()); }
};

// Returns every invariant violation as a human-readable message; the
// instance is well-formed iff the result is empty.
inline std::vector<std::string> validate_instance(const MapfInstance& inst) {
  std::vector<std::string> violations;
  auto agent_name = [](int i) { return "a" + std::to_string(i + 1); };

  if (inst.start.size() != inst.goal.size())
    violations.push_back("start and goal configurations differ in length");
  if (inst.start.empty()) violations.push_back("instance has no agents");

  std::unordered_set<int> seen_start, seen_goal;
  for (int i = 0; i < static_cast<int>(inst.start.size()); ++i) {
    int s = inst.start[i];
    if (!inst.graph.valid_vertex(s))
      violations.push_back("start vertex out of range for " + agent_name(i));
    else if (!seen_start.insert(s).second)
      violations.push_back("duplicate start vertex " + std::to_string(s));
  }
  for (int i = 0; i < static_cast<int>(inst.goal.size()); ++i) {
    int g = inst.goal[i];
    if (!inst.graph.valid_vertex(g))
      violations.push_back("goal vertex out of range for " + agent_name(i));
    else if (!seen_goal.insert(g).second)
      violations.push_back("duplicate goal vertex " + std::to_string(g));
  }
  return violations;
}

inline bool instance_ok(const MapfInstance& inst) {
  return validate_instance(inst).empty();
}

}  // namespace mapfsat
