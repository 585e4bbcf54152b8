#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mapfsat {

// Undirected graph over dense vertex ids [0, vertex_count).
// No self-loops; adjacency lists kept sorted and deduplicated.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int vertex_count) : adj_(vertex_count) {}

  int vertex_count() const { return static_cast<int>(adj_.size()); }

  void add_edge(int u, int v) {
    if (u == v) throw std::invalid_argument("graph: self-loop rejected");
    check_vertex(u);
    check_vertex(v);
    if (adjacent(u, v)) return;
    insert_sorted(adj_[u], v);
    insert_sorted(adj_[v], u);
    edges_.emplace_back(std::min(u, v), std::max(u, v));
  }

  bool adjacent(int u, int v) const {
    const auto& n = adj_[u];
    return std::binary_search(n.begin(), n.end(), v);
  }

  const std::vector<int>& neighbors(int v) const { return adj_[v]; }

  // Edge list with u < v, in insertion order.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  bool valid_vertex(int v) const { return v >= 0 && v < vertex_count(); }

 private:
  void check_vertex(int v) const {
    if (!valid_vertex(v)) throw std::out_of_range("graph: vertex out of range");
  }
  static void insert_sorted(std::vector<int>& xs, int v) {
    xs.insert(std::lower_bound(xs.begin(), xs.end(), v), v);
  }

  std::vector<std::vector<int>> adj_;
  std::vector<std::pair<int, int>> edges_;
};

inline Graph path_graph(int n) {
  Graph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

inline Graph cycle_graph(int n) {
  Graph g = path_graph(n);
  if (n >= 3) g.add_edge(n - 1, 0);
  return g;
}

}  // namespace mapfsat
