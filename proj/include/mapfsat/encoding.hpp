#pragma once

#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mapfsat/mdd.hpp"
#include "mapfsat/sat.hpp"
#include "mapfsat/solution.hpp"

namespace mapfsat {

// ---------------------------------------------------------------------------
// Cardinality encodings
// ---------------------------------------------------------------------------

// At-most-one: pairwise up to kPairwiseAmoLimit inputs, sequential
// (Sinz-style, one aux chain) above. MDD layers are tiny near the start
// and goal and wide mid-horizon; the hybrid keeps clause counts tame.
constexpr size_t kPairwiseAmoLimit = 6;

inline void add_at_most_one(Solver& s, const std::vector<Lit>& xs) {
  const size_t n = xs.size();
  if (n <= 1) return;
  if (n <= kPairwiseAmoLimit) {
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) s.add_clause({~xs[i], ~xs[j]});
    return;
  }
  std::vector<int> chain(n - 1);
  for (auto& v : chain) v = s.new_var();
  s.add_clause({~xs[0], pos(chain[0])});
  for (size_t i = 1; i + 1 < n; ++i) {
    s.add_clause({~xs[i], pos(chain[i])});
    s.add_clause({neg(chain[i - 1]), pos(chain[i])});
    s.add_clause({neg(chain[i - 1]), ~xs[i]});
  }
  s.add_clause({neg(chain[n - 2]), ~xs[n - 1]});
}

// Sequential counter (Sinz LT-SEQ): sum(xs) <= bound. Unit-propagation
// complete; aux registers r[i][j] mean "at least j of the first i+1
// inputs are true".
inline void add_at_most_k(Solver& s, const std::vector<Lit>& xs, int bound) {
  const int n = static_cast<int>(xs.size());
  if (bound < 0) throw std::invalid_argument("add_at_most_k: negative bound");
  if (n <= bound) return;
  if (bound == 0) {
    for (Lit x : xs) s.add_clause({~x});
    return;
  }
  std::vector<std::vector<Lit>> r(n - 1, std::vector<Lit>(bound));
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < bound; ++j) r[i][j] = pos(s.new_var());

  s.add_clause({~xs[0], r[0][0]});
  for (int j = 1; j < bound; ++j) s.add_clause({~r[0][j]});
  for (int i = 1; i < n - 1; ++i) {
    s.add_clause({~xs[i], r[i][0]});
    s.add_clause({~r[i - 1][0], r[i][0]});
    for (int j = 1; j < bound; ++j) {
      s.add_clause({~xs[i], ~r[i - 1][j - 1], r[i][j]});
      s.add_clause({~r[i - 1][j], r[i][j]});
    }
    s.add_clause({~xs[i], ~r[i - 1][bound - 1]});
  }
  s.add_clause({~xs[n - 1], ~r[n - 2][bound - 1]});
}

// ---------------------------------------------------------------------------
// Variable map
// ---------------------------------------------------------------------------

struct VarMeaning {
  enum class Kind : uint8_t { Vertex, Arc, Surplus };
  Kind kind;
  int agent;
  int t;
  int u;  // vertex, or arc tail
  int v;  // arc head (== u for Vertex/Surplus)
};

// Bidirectional mapping between SAT variables and their MAPF meanings:
// X_u^t(a) vertex occupancy, E_{u,v}^t(a) arc traversal (waits included),
// and the per-(agent, t) surplus indicators feeding the cost bound.
// Numbering is deterministic: agent-major, timestep-minor, vertex order,
// so identical inputs produce diffable DIMACS dumps.
class VarMap {
 public:
  VarMap() = default;

  explicit VarMap(const std::vector<Mdd>& mdds) {
    const int k = static_cast<int>(mdds.size());
    agents_ = k;
    horizon_ = k > 0 ? mdds[0].horizon : 0;
    layers_.resize(k);
    arcs_.resize(k);
    x_base_.resize(k);
    e_base_.resize(k);
    u_base_.resize(k);
    shortest_.resize(k);
    int next = 0;
    for (int a = 0; a < k; ++a) {
      const Mdd& m = mdds[a];
      layers_[a] = m.layers;
      arcs_[a] = m.arcs;
      shortest_[a] = goal_entry_time(m);
      x_base_[a].resize(horizon_ + 1);
      e_base_[a].assign(horizon_, 0);
      for (int t = 0; t <= horizon_; ++t) {
        x_base_[a][t] = next;
        for (int v : m.layers[t])
          meanings_.push_back({VarMeaning::Kind::Vertex, a, t, v, v});
        next += static_cast<int>(m.layers[t].size());
        if (t < horizon_) {
          e_base_[a][t] = next;
          for (auto [u, v] : m.arcs[t])
            meanings_.push_back({VarMeaning::Kind::Arc, a, t, u, v});
          next += static_cast<int>(m.arcs[t].size());
        }
      }
      u_base_[a] = next;
      for (int t = shortest_[a]; t < horizon_; ++t) {
        meanings_.push_back({VarMeaning::Kind::Surplus, a, t, -1, -1});
        ++next;
      }
    }
    total_ = next;
  }

  int total_vars() const { return total_; }
  int num_agents() const { return agents_; }
  int horizon() const { return horizon_; }
  int shortest(int agent) const { return shortest_[agent]; }

  const std::vector<int>& layer(int agent, int t) const {
    return layers_[agent][t];
  }
  const std::vector<std::pair<int, int>>& arcs(int agent, int t) const {
    return arcs_[agent][t];
  }

  int layer_var(int agent, int t, size_t idx) const {
    return x_base_[agent][t] + static_cast<int>(idx);
  }
  int arc_var_at(int agent, int t, size_t idx) const {
    return e_base_[agent][t] + static_cast<int>(idx);
  }

  std::optional<int> vertex_var(int agent, int t, int v) const {
    if (t < 0 || t > horizon_) return std::nullopt;
    const auto& layer = layers_[agent][t];
    auto it = std::lower_bound(layer.begin(), layer.end(), v);
    if (it == layer.end() || *it != v) return std::nullopt;
    return x_base_[agent][t] + static_cast<int>(it - layer.begin());
  }

  std::optional<int> arc_var(int agent, int t, int u, int v) const {
    if (t < 0 || t >= horizon_) return std::nullopt;
    const auto& arcs = arcs_[agent][t];
    auto key = std::make_pair(u, v);
    auto it = std::lower_bound(arcs.begin(), arcs.end(), key);
    if (it == arcs.end() || *it != key) return std::nullopt;
    return e_base_[agent][t] + static_cast<int>(it - arcs.begin());
  }

  // Surplus indicator for timestep t in [shortest(agent), horizon).
  int surplus_var(int agent, int t) const {
    return u_base_[agent] + (t - shortest_[agent]);
  }

  const VarMeaning& meaning(int var) const { return meanings_[var]; }

 private:
  static int goal_entry_time(const Mdd& m) {
    // The goal joins its layer exactly at dist(start, goal).
    const int goal = m.layers[m.horizon].front();
    for (int t = 0; t <= m.horizon; ++t)
      if (std::binary_search(m.layers[t].begin(), m.layers[t].end(), goal))
        return t;
    return m.horizon;
  }

  int agents_ = 0;
  int horizon_ = 0;
  int total_ = 0;
  std::vector<std::vector<std::vector<int>>> layers_;
  std::vector<std::vector<std::vector<std::pair<int, int>>>> arcs_;
  std::vector<std::vector<int>> x_base_;
  std::vector<std::vector<int>> e_base_;
  std::vector<int> u_base_;
  std::vector<int> shortest_;
  std::vector<VarMeaning> meanings_;
};

// ---------------------------------------------------------------------------
// Boolean models
// ---------------------------------------------------------------------------

enum class ModelKind { Complete, Incomplete };

struct BooleanModel {
  ModelKind kind = ModelKind::Complete;
  int xi = 0;
  int xi0 = 0;
  int delta = 0;
  int horizon = 0;
  std::vector<Mdd> mdds;
  VarMap varmap;
  Solver solver;
  std::set<Conflict> incorporated;

  size_t clause_count() const {
    return solver.num_problem_and_theory_clauses();
  }
};

// Collision-avoidance clause for one conflict; nullopt when either
// variable does not exist in the current diagrams (the constraint is
// vacuous there: the agent cannot reach that location/time at all).
inline std::optional<std::vector<Lit>> refinement_clause(const VarMap& vm,
                                                         const Conflict& c) {
  if (c.kind == Conflict::Kind::Vertex) {
    auto xi = vm.vertex_var(c.a, c.t, c.u);
    auto xj = vm.vertex_var(c.b, c.t, c.u);
    if (!xi || !xj) return std::nullopt;
    return std::vector<Lit>{neg(*xi), neg(*xj)};
  }
  auto ei = vm.arc_var(c.a, c.t, c.u, c.v);
  auto ej = vm.arc_var(c.b, c.t, c.v, c.u);
  if (!ei || !ej) return std::nullopt;
  return std::vector<Lit>{neg(*ei), neg(*ej)};
}

namespace detail {

inline BooleanModel encode_model(ModelKind kind, const MapfInstance& inst,
                                 std::vector<Mdd> mdds, int xi,
                                 const std::set<Conflict>& conflicts) {
  BooleanModel model;
  model.kind = kind;
  model.xi = xi;
  model.mdds = std::move(mdds);
  model.varmap = VarMap(model.mdds);
  model.horizon = model.varmap.horizon();

  const int k = static_cast<int>(model.mdds.size());
  const int T = model.horizon;
  const VarMap& vm = model.varmap;
  Solver& s = model.solver;

  int xi0 = 0;
  for (int a = 0; a < k; ++a) xi0 += vm.shortest(a);
  model.xi0 = xi0;
  model.delta = xi - xi0;
  if (model.delta < 0)
    throw std::invalid_argument("encode: xi below the lower bound");

  s.new_vars(vm.total_vars());

  for (int a = 0; a < k; ++a) {
    // C1: start and goal occupancy.
    s.add_clause({pos(*vm.vertex_var(a, 0, inst.start[a]))});
    s.add_clause({pos(*vm.vertex_var(a, T, inst.goal[a]))});

    for (int t = 0; t <= T; ++t) {
      // C2: at most one vertex per timestep.
      std::vector<Lit> layer_lits;
      for (size_t i = 0; i < vm.layer(a, t).size(); ++i)
        layer_lits.push_back(pos(vm.layer_var(a, t, i)));
      add_at_most_one(s, layer_lits);

      if (t == T) continue;
      const auto& arcs = vm.arcs(a, t);
      // C3': arc endpoints.
      for (size_t i = 0; i < arcs.size(); ++i) {
        Lit e = pos(vm.arc_var_at(a, t, i));
        s.add_clause({~e, pos(*vm.vertex_var(a, t, arcs[i].first))});
        s.add_clause({~e, pos(*vm.vertex_var(a, t + 1, arcs[i].second))});
      }
      // C3 flow-out and C4 at-most-one outgoing arc, grouped per vertex;
      // arcs are sorted, so each vertex's block is contiguous.
      size_t i = 0;
      while (i < arcs.size()) {
        size_t j = i;
        while (j < arcs.size() && arcs[j].first == arcs[i].first) ++j;
        std::vector<Lit> outgoing;
        for (size_t m = i; m < j; ++m)
          outgoing.push_back(pos(vm.arc_var_at(a, t, m)));
        std::vector<Lit> flow{neg(*vm.vertex_var(a, t, arcs[i].first))};
        flow.insert(flow.end(), outgoing.begin(), outgoing.end());
        s.add_clause(std::move(flow));
        add_at_most_one(s, outgoing);
        i = j;
      }
    }
  }

  // C8: cost bound. surplus[a][t] says agent a is not yet settled at its
  // goal at timestep t (t >= its shortest distance). Any arc other than a
  // goal wait implies it, and the chain propagates it backwards, so a
  // goal wait followed by later movement is charged while trailing goal
  // waits stay free. A global sequential counter caps the total at delta.
  std::vector<Lit> surplus_lits;
  for (int a = 0; a < k; ++a) {
    const int d = vm.shortest(a);
    const int goal = inst.goal[a];
    for (int t = d; t < T; ++t) {
      Lit u_t = pos(vm.surplus_var(a, t));
      surplus_lits.push_back(u_t);
      if (t + 1 < T)
        s.add_clause({neg(vm.surplus_var(a, t + 1)), u_t});
      const auto& arcs = vm.arcs(a, t);
      for (size_t i = 0; i < arcs.size(); ++i)
        if (!(arcs[i].first == goal && arcs[i].second == goal))
          s.add_clause({neg(vm.arc_var_at(a, t, i)), u_t});
    }
  }
  add_at_most_k(s, surplus_lits, model.delta);

  if (kind == ModelKind::Complete) {
    // C5: vertex collisions over shared diagram nodes.
    for (int t = 0; t <= T; ++t)
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          const auto& li = vm.layer(i, t);
          const auto& lj = vm.layer(j, t);
          size_t pi = 0, pj = 0;
          while (pi < li.size() && pj < lj.size()) {
            if (li[pi] < lj[pj]) ++pi;
            else if (li[pi] > lj[pj]) ++pj;
            else {
              s.add_clause({neg(vm.layer_var(i, t, pi)),
                            neg(vm.layer_var(j, t, pj))});
              ++pi;
              ++pj;
            }
          }
        }
    // C6: swaps over opposing arcs of one edge. Entering a vertex that is
    // simultaneously vacated stays legal, so no further constraint.
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          const auto& ai = vm.arcs(i, t);
          for (size_t m = 0; m < ai.size(); ++m) {
            auto [u, v] = ai[m];
            if (u == v) continue;
            if (auto opposing = vm.arc_var(j, t, v, u))
              s.add_clause({neg(vm.arc_var_at(i, t, m)), neg(*opposing)});
          }
        }
  } else {
    for (const Conflict& c : conflicts) {
      model.incorporated.insert(c);
      if (auto clause = refinement_clause(vm, c))
        s.add_clause(std::move(*clause), ClauseKind::Theory);
    }
  }
  return model;
}

}  // namespace detail

// Complete Boolean model F(xi): satisfiable iff the instance has a
// solution of sum-of-costs at most xi (and the series F(xi0), F(xi0+1),
// ... flips to satisfiable exactly at the optimum).
inline BooleanModel encode_complete(const MapfInstance& inst,
                                    std::vector<Mdd> mdds, int xi) {
  return detail::encode_model(ModelKind::Complete, inst, std::move(mdds), xi,
                              {});
}

// Incomplete Boolean model H(xi): single-agent structure and the cost
// bound only, plus collision-avoidance clauses for exactly the recorded
// conflicts. Satisfiable whenever the instance is solvable at xi.
inline BooleanModel encode_incomplete(const std::set<Conflict>& conflicts,
                                      const MapfInstance& inst,
                                      std::vector<Mdd> mdds, int xi) {
  return detail::encode_model(ModelKind::Incomplete, inst, std::move(mdds), xi,
                              conflicts);
}

// Adds the refinement clause of every new collision to the model (Theory
// clauses, never deleted). Idempotent per conflict. Returns how many
// clauses were added.
inline size_t refine(BooleanModel& model,
                     const std::vector<Conflict>& collisions) {
  model.solver.cancel_until(0);
  size_t added = 0;
  for (const Conflict& c : collisions) {
    if (!model.incorporated.insert(c).second) continue;
    if (auto clause = refinement_clause(model.varmap, c)) {
      model.solver.add_clause(std::move(*clause), ClauseKind::Theory);
      ++added;
    }
  }
  return added;
}

// ---------------------------------------------------------------------------
// Assignment extraction
// ---------------------------------------------------------------------------

struct MalformedAssignment : std::logic_error {
  using std::logic_error::logic_error;
};

namespace detail {

template <typename ValueFn>
PartialPaths extract_positions(ValueFn&& val, const VarMap& vm) {
  PartialPaths partial;
  partial.at.assign(vm.num_agents(),
                    std::vector<int>(vm.horizon() + 1, kNoVertex));
  for (int a = 0; a < vm.num_agents(); ++a)
    for (int t = 0; t <= vm.horizon(); ++t) {
      const auto& layer = vm.layer(a, t);
      for (size_t i = 0; i < layer.size(); ++i) {
        if (val(vm.layer_var(a, t, i)) != Value::True) continue;
        if (partial.at[a][t] != kNoVertex)
          throw MalformedAssignment(
              "two vertex variables true for a" + std::to_string(a + 1) +
              " at t=" + std::to_string(t));
        partial.at[a][t] = layer[i];
      }
    }
  return partial;
}

}  // namespace detail

// Reads the unique true vertex variable per (agent, timestep) out of a
// total assignment. Throws MalformedAssignment on zero or two true
// variables at a position (an encoder bug, not a search outcome).
template <typename ValueFn>
Solution extract_solution_fn(ValueFn&& val, const VarMap& vm) {
  PartialPaths partial = detail::extract_positions(val, vm);
  Solution sol;
  sol.paths.resize(vm.num_agents());
  for (int a = 0; a < vm.num_agents(); ++a) {
    for (int t = 0; t <= vm.horizon(); ++t) {
      if (partial.at[a][t] == kNoVertex)
        throw MalformedAssignment("no vertex variable true for a" +
                                  std::to_string(a + 1) +
                                  " at t=" + std::to_string(t));
      sol.paths[a].push_back(partial.at[a][t]);
    }
  }
  return sol;
}

inline Solution extract_solution(const Solver& solver, const VarMap& vm) {
  return extract_solution_fn([&](int v) { return solver.value(v); }, vm);
}

inline Solution extract_solution(const std::vector<Value>& values,
                                 const VarMap& vm) {
  return extract_solution_fn([&](int v) { return values[v]; }, vm);
}

// Partial variant: unassigned and false positions stay gaps.
inline PartialPaths extract_partial_solution(const AssignmentView& view,
                                             const VarMap& vm) {
  return detail::extract_positions([&](int v) { return view.value(v); }, vm);
}

inline PartialPaths extract_partial_solution(const std::vector<Value>& values,
                                             const VarMap& vm) {
  return detail::extract_positions([&](int v) { return values[v]; }, vm);
}

// ---------------------------------------------------------------------------
// DIMACS export with a variable-meaning header
// ---------------------------------------------------------------------------

inline void write_model_dimacs(std::ostream& out, const BooleanModel& model) {
  out << "c "
      << (model.kind == ModelKind::Complete ? "complete" : "incomplete")
      << " model, xi=" << model.xi << " delta=" << model.delta
      << " horizon=" << model.horizon << '\n';
  const VarMap& vm = model.varmap;
  for (int var = 0; var < vm.total_vars(); ++var) {
    const VarMeaning& m = vm.meaning(var);
    out << "c " << var + 1 << ' ';
    switch (m.kind) {
      case VarMeaning::Kind::Vertex:
        out << "X a" << m.agent + 1 << " v" << m.u << " t" << m.t;
        break;
      case VarMeaning::Kind::Arc:
        out << "E a" << m.agent + 1 << " " << m.u << "->" << m.v << " t" << m.t;
        break;
      case VarMeaning::Kind::Surplus:
        out << "U a" << m.agent + 1 << " t" << m.t;
        break;
    }
    out << '\n';
  }
  model.solver.write_dimacs(out);
}

}  // namespace mapfsat
