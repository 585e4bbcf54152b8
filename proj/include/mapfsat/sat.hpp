#pragma once

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mapfsat {

// ---------------------------------------------------------------------------
// Literals and clauses
// ---------------------------------------------------------------------------

// Literal over 0-based variables, encoded as 2*var (positive) or 2*var+1
// (negative); the encoding doubles as a dense watch-list index.
struct Lit {
  int code = -2;

  Lit() = default;
  constexpr Lit(int var, bool positive) : code(2 * var + (positive ? 0 : 1)) {}
  static constexpr Lit from_code(int c) {
    Lit l;
    l.code = c;
    return l;
  }

  int var() const { return code >> 1; }
  bool positive() const { return (code & 1) == 0; }
  Lit operator~() const { return from_code(code ^ 1); }
  bool operator==(const Lit& o) const { return code == o.code; }
  bool operator!=(const Lit& o) const { return code != o.code; }
  bool operator<(const Lit& o) const { return code < o.code; }
};

inline Lit pos(int var) { return Lit(var, true); }
inline Lit neg(int var) { return Lit(var, false); }

enum class Value : int8_t { False = -1, Unassigned = 0, True = 1 };

enum class ClauseKind : uint8_t { Problem, Learned, Theory };

struct Clause {
  std::vector<Lit> lits;
  ClauseKind kind = ClauseKind::Problem;
  double activity = 0.0;
  bool deleted = false;
};

struct SolverStats {
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t conflicts = 0;
  uint64_t restarts = 0;
  uint64_t learned_added = 0;
  uint64_t learned_deleted = 0;
  uint64_t theory_added = 0;
  uint64_t hook_checks = 0;
  uint64_t hook_checks_partial = 0;
  uint64_t db_reductions = 0;
};

// Cooperative resource budget; checked between conflicts and at
// propagation quiescence, never via thread kills.
struct Budget {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  uint64_t max_conflicts = 0;  // 0 = unlimited

  static Budget with_timeout(double seconds) {
    Budget b;
    b.deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(seconds));
    return b;
  }
};

enum class SolveResult { Sat, Unsat, Budget };

class Solver;

// Read-only window onto the solver's current (partial) assignment, handed
// to theory hooks. Must not be retained beyond the check() call.
class AssignmentView {
 public:
  explicit AssignmentView(const Solver& s) : s_(s) {}
  Value value(int var) const;
  Value value(Lit l) const;
  int num_vars() const;
  size_t num_assigned() const;
  double assigned_fraction() const;
  bool complete() const;

 private:
  const Solver& s_;
};

// Consistency-check callback invoked on partial assignments at scheduled
// assignment fractions and, always, on the complete assignment. Returned
// clauses are installed as Theory clauses (never deleted); they must be
// falsified or undetermined under the assignment the hook was shown --
// returning a satisfied clause is a programming error in the hook.
class TheoryHook {
 public:
  virtual ~TheoryHook() = default;
  std::vector<double> check_points;  // fractions in (0, 1]
  virtual std::vector<std::vector<Lit>> check(const AssignmentView& view) = 0;
};

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

// CDCL with two-watched-literal propagation, 1-UIP learning with basic
// clause minimization, activity/phase-saving heuristics, Luby restarts,
// activity-based deletion of learned clauses, and in-search injection of
// theory clauses at scheduled check points.
class Solver {
 public:
  Solver() = default;
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;
  Solver(Solver&&) = default;
  Solver& operator=(Solver&&) = default;

  // -- variables ------------------------------------------------------------

  int new_var() {
    int v = static_cast<int>(values_.size());
    values_.push_back(Value::Unassigned);
    level_.push_back(0);
    reason_.push_back(-1);
    activity_.push_back(0.0);
    phase_.push_back(false);
    seen_.push_back(0);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v;
  }

  int new_vars(int n) {
    int first = num_vars();
    for (int i = 0; i < n; ++i) new_var();
    return first;
  }

  int num_vars() const { return static_cast<int>(values_.size()); }

  Value value(int var) const { return values_[var]; }
  Value value(Lit l) const {
    Value v = values_[l.var()];
    if (v == Value::Unassigned) return v;
    bool t = (v == Value::True) == l.positive();
    return t ? Value::True : Value::False;
  }

  bool ok() const { return ok_; }

  // -- clause management ----------------------------------------------------

  // Normalizes (sorts, deduplicates, drops tautologies) and installs a
  // clause verbatim; the clause database stays syntactic so counts and
  // DIMACS dumps reflect exactly what was encoded. Clauses unit under the
  // level-0 assignment enqueue their implied literal immediately. Returns
  // false on a top-level conflict, after which the solver is UNSAT.
  bool add_clause(std::vector<Lit> lits, ClauseKind kind = ClauseKind::Problem) {
    if (!ok_) return false;
    if (decision_level() != 0)
      throw std::logic_error("add_clause requires decision level 0");
    std::sort(lits.begin(), lits.end());
    std::vector<Lit> out;
    for (Lit l : lits) {
      if (l.var() < 0 || l.var() >= num_vars())
        throw std::out_of_range("add_clause: unregistered variable");
      if (!out.empty() && out.back() == l) continue;
      if (!out.empty() && out.back() == ~l) return true;  // tautology
      out.push_back(l);
    }
    if (out.empty()) {
      ok_ = false;
      return false;
    }
    if (out.size() == 1) {
      units_.push_back({out[0], kind});
      ++live_count_[static_cast<int>(kind)];
      if (value(out[0]) == Value::False) {
        ok_ = false;
        return false;
      }
      if (value(out[0]) == Value::Unassigned) {
        enqueue(out[0], -1);
        if (propagate()) {
          ok_ = false;
          return false;
        }
      }
      return true;
    }

    // Watch order: non-false literals first, then false ones (all level 0
    // here, hence permanent), so the watch invariants hold at attach time.
    std::stable_sort(out.begin(), out.end(), [&](Lit a, Lit b) {
      return (value(a) != Value::False) > (value(b) != Value::False);
    });
    size_t non_false = 0;
    while (non_false < out.size() && value(out[non_false]) != Value::False)
      ++non_false;
    uint32_t ci = attach_new_clause(std::move(out), kind);
    const Clause& c = clauses_[ci];
    if (non_false == 0) {
      ok_ = false;
      return false;
    }
    if (non_false == 1 && value(c.lits[0]) == Value::Unassigned) {
      enqueue(c.lits[0], static_cast<int32_t>(ci));
      if (propagate()) {
        ok_ = false;
        return false;
      }
    }
    return true;
  }

  size_t num_clauses(ClauseKind kind) const {
    return live_count_[static_cast<int>(kind)];
  }
  size_t num_problem_and_theory_clauses() const {
    return num_clauses(ClauseKind::Problem) + num_clauses(ClauseKind::Theory);
  }

  std::vector<std::vector<Lit>> clauses_of_kind(ClauseKind kind) const {
    std::vector<std::vector<Lit>> out;
    for (const Clause& c : clauses_)
      if (!c.deleted && c.kind == kind) out.push_back(c.lits);
    return out;
  }

  template <typename F>
  void for_each_clause(F&& fn) const {
    for (const Clause& c : clauses_)
      if (!c.deleted) fn(c);
  }

  // -- low-level search steps (composed by solve(); exposed for tests) -------

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  // Exhaustive unit propagation; returns the first falsified clause index.
  std::optional<uint32_t> propagate() {
    std::optional<uint32_t> conflict;
    while (qhead_ < trail_.size()) {
      Lit p = trail_[qhead_++];  // p just became true
      ++stats_.propagations;
      if ((stats_.propagations & 0xFFF) == 0) poll_deadline();
      auto& ws = watches_[p.code];
      size_t i = 0, j = 0;
      while (i < ws.size()) {
        uint32_t ci = ws[i];
        Clause& c = clauses_[ci];
        Lit false_lit = ~p;
        if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
        Lit first = c.lits[0];
        if (value(first) == Value::True) {
          ws[j++] = ws[i++];
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != Value::False) {
            std::swap(c.lits[1], c.lits[k]);
            watches_[(~c.lits[1]).code].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) {
          ++i;
          continue;
        }
        ws[j++] = ws[i++];
        if (value(first) == Value::False) {
          while (i < ws.size()) ws[j++] = ws[i++];
          conflict = ci;
          qhead_ = trail_.size();
          break;
        }
        enqueue(first, static_cast<int32_t>(ci));
      }
      ws.resize(j);
      if (conflict) break;
    }
    if (debug_checks && !conflict) assert_no_missed_propagation();
    return conflict;
  }

  // Pushes a new decision level and assigns l. Counted as a decision.
  void enqueue_decision(Lit l) {
    assert(value(l) == Value::Unassigned);
    ++stats_.decisions;
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(l, -1);
  }

  // Activity-ordered pick with saved phase (default false); ties break
  // toward the lowest variable id. nullopt iff every variable is assigned.
  std::optional<Lit> pick_branch() {
    while (!heap_.empty()) {
      int v = heap_top();
      if (values_[v] == Value::Unassigned) return Lit(v, phase_[v]);
      heap_pop();
    }
    return std::nullopt;
  }

  struct AnalysisResult {
    std::vector<Lit> learned;
    int backtrack_level = 0;
  };

  // 1-UIP conflict analysis. Learns the derived clause, backjumps to the
  // computed level and enqueues the asserting literal.
  AnalysisResult analyze_conflict(uint32_t confl) {
    if (decision_level() == 0)
      throw std::logic_error("analyze_conflict at decision level 0");
    ++stats_.conflicts;
    ++conflicts_since_restart_;

    std::vector<Lit> learnt{Lit()};
    std::vector<int> to_clear;
    int path_count = 0;
    Lit p;
    bool have_p = false;
    size_t index = trail_.size();
    uint32_t c_idx = confl;

    for (;;) {
      Clause& c = clauses_[c_idx];
      if (c.kind == ClauseKind::Learned) bump_clause(c);
      for (size_t k = have_p ? 1 : 0; k < c.lits.size(); ++k) {
        Lit q = c.lits[k];
        int v = q.var();
        if (!seen_[v] && level_[v] > 0) {
          seen_[v] = 1;
          to_clear.push_back(v);
          bump_var(v);
          if (level_[v] >= decision_level())
            ++path_count;
          else
            learnt.push_back(q);
        }
      }
      while (!seen_[trail_[index - 1].var()]) --index;
      --index;
      p = trail_[index];
      have_p = true;
      seen_[p.var()] = 0;
      --path_count;
      if (path_count <= 0) break;
      assert(reason_[p.var()] >= 0);
      c_idx = static_cast<uint32_t>(reason_[p.var()]);
    }
    learnt[0] = ~p;

    // Basic self-subsumption: drop literals whose reason clause lies
    // entirely within the learnt clause.
    size_t out = 1;
    for (size_t k = 1; k < learnt.size(); ++k) {
      int v = learnt[k].var();
      int32_t r = reason_[v];
      bool redundant = r >= 0;
      if (redundant) {
        const Clause& rc = clauses_[r];
        for (size_t m = 1; m < rc.lits.size(); ++m) {
          int rv = rc.lits[m].var();
          if (!seen_[rv] && level_[rv] > 0) {
            redundant = false;
            break;
          }
        }
      }
      if (!redundant) learnt[out++] = learnt[k];
    }
    learnt.resize(out);
    for (int v : to_clear) seen_[v] = 0;

    AnalysisResult res;
    res.learned = learnt;
    if (learnt.size() == 1) {
      res.backtrack_level = 0;
      cancel_until(0);
      enqueue(learnt[0], -1);
    } else {
      size_t max_i = 1;
      for (size_t k = 2; k < learnt.size(); ++k)
        if (level_[learnt[k].var()] > level_[learnt[max_i].var()]) max_i = k;
      std::swap(learnt[1], learnt[max_i]);
      res.backtrack_level = level_[learnt[1].var()];
      cancel_until(res.backtrack_level);
      uint32_t ci = attach_new_clause(std::move(learnt), ClauseKind::Learned);
      enqueue(clauses_[ci].lits[0], static_cast<int32_t>(ci));
      res.learned = clauses_[ci].lits;
    }
    ++stats_.learned_added;
    decay_activities();
    return res;
  }

  void cancel_until(int target_level) {
    if (decision_level() <= target_level) return;
    int boundary = trail_lim_[target_level];
    for (size_t k = trail_.size(); k > static_cast<size_t>(boundary); --k) {
      Lit l = trail_[k - 1];
      int v = l.var();
      phase_[v] = values_[v] == Value::True;
      values_[v] = Value::Unassigned;
      reason_[v] = -1;
      heap_insert(v);
    }
    trail_.resize(boundary);
    trail_lim_.resize(target_level);
    qhead_ = trail_.size();
  }

  // -- main search ------------------------------------------------------------

  SolveResult solve(TheoryHook* hook = nullptr, const Budget& budget = Budget{}) {
    if (!ok_) return SolveResult::Unsat;
    budget_ = budget;
    budget_hit_ = false;
    cancel_until(0);
    conflicts_since_restart_ = 0;
    restart_count_ = 0;
    if (max_learned_ == 0) max_learned_ = std::max<size_t>(reduce_base, 16);

    std::vector<double> check_points;
    if (hook) {
      check_points = hook->check_points;
      std::sort(check_points.begin(), check_points.end());
    }
    std::vector<int> fired_at(check_points.size(), -1);  // -1 = armed
    bool recheck_pending = false;
    const uint64_t conflict_cap =
        budget.max_conflicts ? stats_.conflicts + budget.max_conflicts
                             : std::numeric_limits<uint64_t>::max();

    for (;;) {
      if (auto confl = propagate()) {
        if (decision_level() == 0) {
          ok_ = false;
          return SolveResult::Unsat;
        }
        analyze_conflict(*confl);
        if (stats_.conflicts >= conflict_cap) budget_hit_ = true;
        if (budget_hit_) return SolveResult::Budget;
        continue;
      }

      // Quiescent: re-arm check points fired above the current level.
      for (size_t i = 0; i < fired_at.size(); ++i)
        if (fired_at[i] > decision_level()) fired_at[i] = -1;

      poll_deadline();
      if (budget_hit_) return SolveResult::Budget;

      if (conflicts_since_restart_ >= restart_threshold() &&
          decision_level() > 0) {
        ++stats_.restarts;
        ++restart_count_;
        conflicts_since_restart_ = 0;
        cancel_until(0);
        continue;
      }

      if (live_count_[static_cast<int>(ClauseKind::Learned)] > max_learned_)
        reduce_learned_db();

      const bool complete = trail_.size() == static_cast<size_t>(num_vars());

      if (hook) {
        bool fire = false;
        double fraction =
            num_vars() == 0 ? 1.0
                            : static_cast<double>(trail_.size()) / num_vars();
        for (size_t i = 0; i < check_points.size(); ++i)
          if (fired_at[i] < 0 && check_points[i] <= fraction + 1e-12) {
            fired_at[i] = decision_level();
            fire = true;
          }
        if (fire || recheck_pending || complete) {
          ++stats_.hook_checks;
          if (!complete) ++stats_.hook_checks_partial;
          auto injected = hook->check(AssignmentView(*this));
          if (!injected.empty()) {
            recheck_pending = true;
            if (!inject_theory_clauses(injected)) return SolveResult::Unsat;
            if (budget_hit_) return SolveResult::Budget;
            continue;  // propagate, then re-check until no collisions remain
          }
          recheck_pending = false;
        }
      }

      if (complete) return SolveResult::Sat;

      auto branch = pick_branch();
      assert(branch.has_value());
      enqueue_decision(*branch);
    }
  }

  const SolverStats& stats() const { return stats_; }

  // -- DIMACS ----------------------------------------------------------------

  void write_dimacs(std::ostream& out, bool include_learned = false) const {
    size_t count = num_problem_and_theory_clauses();
    if (include_learned) count += num_clauses(ClauseKind::Learned);
    out << "p cnf " << num_vars() << ' ' << count << '\n';
    for (const auto& [lit, kind] : units_) out << dimacs_lit(lit) << " 0\n";
    for (const Clause& c : clauses_) {
      if (c.deleted) continue;
      if (c.kind == ClauseKind::Learned && !include_learned) continue;
      for (Lit l : c.lits) out << dimacs_lit(l) << ' ';
      out << "0\n";
    }
  }

  // Enables an exhaustive post-propagation scan asserting that no live
  // clause is unit or falsified while undetected. Test builds only.
  bool debug_checks = false;

  // Learned clauses kept before the first database reduction; grows 1.5x
  // after each reduction.
  size_t reduce_base = 2000;

 private:
  friend class AssignmentView;

  // -- assignment ------------------------------------------------------------

  void enqueue(Lit p, int32_t reason) {
    assert(value(p) == Value::Unassigned);
    int v = p.var();
    values_[v] = p.positive() ? Value::True : Value::False;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(p);
  }

  // -- clause arena ----------------------------------------------------------

  uint32_t attach_new_clause(std::vector<Lit> lits, ClauseKind kind) {
    assert(lits.size() >= 2);
    uint32_t ci;
    if (!free_slots_.empty()) {
      ci = free_slots_.back();
      free_slots_.pop_back();
      clauses_[ci] = Clause{std::move(lits), kind, 0.0, false};
    } else {
      ci = static_cast<uint32_t>(clauses_.size());
      clauses_.push_back(Clause{std::move(lits), kind, 0.0, false});
    }
    ++live_count_[static_cast<int>(kind)];
    Clause& c = clauses_[ci];
    watches_[(~c.lits[0]).code].push_back(ci);
    watches_[(~c.lits[1]).code].push_back(ci);
    return ci;
  }

  void detach_clause(uint32_t ci) {
    Clause& c = clauses_[ci];
    for (int w = 0; w < 2; ++w) {
      auto& ws = watches_[(~c.lits[w]).code];
      ws.erase(std::find(ws.begin(), ws.end(), ci));
    }
  }

  void delete_clause(uint32_t ci) {
    Clause& c = clauses_[ci];
    detach_clause(ci);
    --live_count_[static_cast<int>(c.kind)];
    c.deleted = true;
    c.lits.clear();
    c.lits.shrink_to_fit();
    free_slots_.push_back(ci);
  }

  bool clause_locked(uint32_t ci) const {
    const Clause& c = clauses_[ci];
    int v = c.lits[0].var();
    return values_[v] != Value::Unassigned &&
           reason_[v] == static_cast<int32_t>(ci);
  }

  void reduce_learned_db() {
    ++stats_.db_reductions;
    std::vector<uint32_t> candidates;
    for (uint32_t ci = 0; ci < clauses_.size(); ++ci) {
      const Clause& c = clauses_[ci];
      if (c.deleted || c.kind != ClauseKind::Learned) continue;
      if (c.lits.size() <= 2 || clause_locked(ci)) continue;
      candidates.push_back(ci);
    }
    std::sort(candidates.begin(), candidates.end(), [&](uint32_t a, uint32_t b) {
      return clauses_[a].activity < clauses_[b].activity;
    });
    size_t to_delete = candidates.size() / 2;
    for (size_t i = 0; i < to_delete; ++i) {
      delete_clause(candidates[i]);
      ++stats_.learned_deleted;
    }
    max_learned_ = max_learned_ + max_learned_ / 2;
  }

  // -- in-search theory clause injection --------------------------------------

  // Adds hook-returned clauses while search is in flight. Falsified
  // clauses first backtrack to their highest literal level and then run
  // regular conflict analysis with the theory clause as the conflict;
  // pseudo-unit clauses backtrack far enough that the implied literal is
  // recorded at the correct level. Returns false on UNSAT.
  bool inject_theory_clauses(const std::vector<std::vector<Lit>>& injected) {
    // Validate against the assignment the hook saw, before any mutation.
    for (const auto& raw : injected) {
      if (raw.empty())
        throw std::logic_error("theory hook returned an empty clause");
      for (Lit l : raw) {
        if (l.var() < 0 || l.var() >= num_vars())
          throw std::out_of_range("theory clause uses unregistered variable");
        if (value(l) == Value::True)
          throw std::logic_error(
              "theory hook returned a clause satisfied under the current "
              "assignment");
      }
    }
    for (auto lits : injected) {
      std::sort(lits.begin(), lits.end());
      std::vector<Lit> out;
      bool tautology = false;
      for (Lit l : lits) {
        if (!out.empty() && out.back() == l) continue;
        if (!out.empty() && out.back() == ~l) {
          tautology = true;
          break;
        }
        out.push_back(l);
      }
      if (tautology)
        throw std::logic_error("theory hook returned a tautological clause");
      ++stats_.theory_added;
      if (!install_in_search(std::move(out), ClauseKind::Theory)) return false;
      if (budget_hit_) return true;
    }
    return true;
  }

  bool install_in_search(std::vector<Lit> lits, ClauseKind kind) {
    // Drop literals already false at level 0; they can never be undone.
    std::erase_if(lits, [&](Lit l) {
      return value(l) == Value::False && level_[l.var()] == 0;
    });
    if (lits.empty()) {
      ok_ = false;
      return false;
    }
    if (lits.size() == 1) {
      Lit unit = lits[0];
      if (value(unit) == Value::True && level_[unit.var()] == 0) return true;
      cancel_until(0);
      if (value(unit) == Value::False) {
        ok_ = false;
        return false;
      }
      enqueue(unit, -1);
      return true;
    }

    // Order literals: non-false first, then false by descending level.
    auto rank = [&](Lit l) {
      if (value(l) != Value::False) return std::numeric_limits<int>::max();
      return level_[l.var()];
    };
    std::stable_sort(lits.begin(), lits.end(),
                     [&](Lit a, Lit b) { return rank(a) > rank(b); });

    size_t non_false = 0;
    while (non_false < lits.size() && value(lits[non_false]) != Value::False)
      ++non_false;

    if (non_false >= 2) {
      attach_new_clause(std::move(lits), kind);
      return true;
    }

    if (non_false == 1) {
      int max_false_level = level_[lits[1].var()];
      Lit head = lits[0];
      bool head_above =
          value(head) == Value::True && level_[head.var()] > max_false_level;
      if (value(head) == Value::True && !head_above) {
        // Satisfied at or below the deepest false literal: plain attach.
        attach_new_clause(std::move(lits), kind);
        return true;
      }
      // Unit (or satisfied only above the false literals): backtrack so
      // the implication is recorded at the level that created it.
      cancel_until(max_false_level);
      uint32_t ci = attach_new_clause(std::move(lits), kind);
      if (value(clauses_[ci].lits[0]) == Value::Unassigned)
        enqueue(clauses_[ci].lits[0], static_cast<int32_t>(ci));
      return true;
    }

    // Falsified: conflict at the deepest literal level.
    int max_level = level_[lits[0].var()];
    if (max_level == 0) {
      ok_ = false;
      return false;
    }
    cancel_until(max_level);
    uint32_t ci = attach_new_clause(std::move(lits), kind);
    analyze_conflict(ci);
    return true;
  }

  // -- heuristics --------------------------------------------------------------

  void bump_var(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    heap_update(v);
  }

  void bump_clause(Clause& c) {
    c.activity += cla_inc_;
    if (c.activity > 1e20) {
      for (Clause& cl : clauses_)
        if (!cl.deleted && cl.kind == ClauseKind::Learned) cl.activity *= 1e-20;
      cla_inc_ *= 1e-20;
    }
  }

  void decay_activities() {
    var_inc_ /= 0.95;
    cla_inc_ /= 0.999;
  }

  uint64_t restart_threshold() const { return 64 * luby(restart_count_ + 1); }

  // Luby sequence 1,1,2,1,1,2,4,... for i >= 1.
  static uint64_t luby(uint64_t i) {
    for (;;) {
      uint64_t k = 1;
      while (((uint64_t{1} << k) - 1) < i) ++k;
      if (((uint64_t{1} << k) - 1) == i) return uint64_t{1} << (k - 1);
      i -= (uint64_t{1} << (k - 1)) - 1;
    }
  }

  void poll_deadline() {
    if (!budget_.deadline || budget_hit_) return;
    if (std::chrono::steady_clock::now() >= *budget_.deadline)
      budget_hit_ = true;
  }

  // -- variable order heap -----------------------------------------------------

  bool heap_less(int a, int b) const {
    if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
    return a < b;
  }

  void heap_insert(int v) {
    if (heap_pos_.size() <= static_cast<size_t>(v)) heap_pos_.resize(v + 1, -1);
    if (heap_pos_[v] >= 0) return;
    heap_pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_sift_up(heap_pos_[v]);
  }

  int heap_top() const { return heap_[0]; }

  void heap_pop() {
    int last = heap_.back();
    heap_pos_[heap_[0]] = -1;
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_pos_[last] = 0;
      heap_sift_down(0);
    }
  }

  void heap_update(int v) {
    if (static_cast<size_t>(v) < heap_pos_.size() && heap_pos_[v] >= 0)
      heap_sift_up(heap_pos_[v]);
  }

  void heap_sift_up(int i) {
    while (i > 0) {
      int parent = (i - 1) / 2;
      if (!heap_less(heap_[i], heap_[parent])) break;
      std::swap(heap_[i], heap_[parent]);
      heap_pos_[heap_[i]] = i;
      heap_pos_[heap_[parent]] = parent;
      i = parent;
    }
  }

  void heap_sift_down(int i) {
    int n = static_cast<int>(heap_.size());
    for (;;) {
      int best = i, l = 2 * i + 1, r = 2 * i + 2;
      if (l < n && heap_less(heap_[l], heap_[best])) best = l;
      if (r < n && heap_less(heap_[r], heap_[best])) best = r;
      if (best == i) break;
      std::swap(heap_[i], heap_[best]);
      heap_pos_[heap_[i]] = i;
      heap_pos_[heap_[best]] = best;
      i = best;
    }
  }

  // -- diagnostics ---------------------------------------------------------------

  void assert_no_missed_propagation() const {
    for (const Clause& c : clauses_) {
      if (c.deleted) continue;
      int non_false = 0;
      bool satisfied = false;
      Lit pending;
      for (Lit l : c.lits) {
        Value v = value(l);
        if (v == Value::True) satisfied = true;
        if (v != Value::False) {
          ++non_false;
          pending = l;
        }
      }
      if (satisfied) continue;
      if (non_false == 0)
        throw std::logic_error("watch invariant: undetected falsified clause");
      if (non_false == 1 && value(pending) == Value::Unassigned)
        throw std::logic_error("watch invariant: undetected unit clause");
    }
  }

  static int dimacs_lit(Lit l) {
    return l.positive() ? l.var() + 1 : -(l.var() + 1);
  }

  // -- state -------------------------------------------------------------------

  std::vector<Clause> clauses_;
  std::vector<uint32_t> free_slots_;
  std::vector<std::pair<Lit, ClauseKind>> units_;  // unit input clauses
  size_t live_count_[3] = {0, 0, 0};
  std::vector<std::vector<uint32_t>> watches_;  // indexed by Lit::code

  std::vector<Value> values_;
  std::vector<int> level_;
  std::vector<int32_t> reason_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  size_t qhead_ = 0;
  bool ok_ = true;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  std::vector<bool> phase_;
  std::vector<char> seen_;
  std::vector<int> heap_;
  std::vector<int> heap_pos_;

  size_t max_learned_ = 0;
  uint64_t conflicts_since_restart_ = 0;
  uint64_t restart_count_ = 0;

  Budget budget_;
  bool budget_hit_ = false;

  SolverStats stats_;
};

inline Value AssignmentView::value(int var) const { return s_.value(var); }
inline Value AssignmentView::value(Lit l) const { return s_.value(l); }
inline int AssignmentView::num_vars() const { return s_.num_vars(); }
inline size_t AssignmentView::num_assigned() const { return s_.trail_.size(); }
inline double AssignmentView::assigned_fraction() const {
  return s_.num_vars() == 0
             ? 1.0
             : static_cast<double>(s_.trail_.size()) / s_.num_vars();
}
inline bool AssignmentView::complete() const {
  return s_.trail_.size() == static_cast<size_t>(s_.num_vars());
}

// ---------------------------------------------------------------------------
// DIMACS import
// ---------------------------------------------------------------------------

struct DimacsProblem {
  int num_vars = 0;
  std::vector<std::vector<Lit>> clauses;
};

inline DimacsProblem parse_dimacs(std::istream& in) {
  DimacsProblem p;
  std::string token;
  bool have_header = false;
  std::vector<Lit> current;
  while (in >> token) {
    if (token == "c") {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (token == "p") {
      std::string fmt;
      int nclauses = 0;
      if (!(in >> fmt >> p.num_vars >> nclauses) || fmt != "cnf")
        throw std::runtime_error("dimacs: malformed problem line");
      have_header = true;
      continue;
    }
    int value = 0;
    try {
      value = std::stoi(token);
    } catch (const std::exception&) {
      throw std::runtime_error("dimacs: unexpected token '" + token + "'");
    }
    if (!have_header) throw std::runtime_error("dimacs: clause before header");
    if (value == 0) {
      p.clauses.push_back(current);
      current.clear();
    } else {
      int var = std::abs(value) - 1;
      if (var >= p.num_vars) throw std::runtime_error("dimacs: variable out of range");
      current.push_back(Lit(var, value > 0));
    }
  }
  if (!current.empty()) throw std::runtime_error("dimacs: unterminated clause");
  return p;
}

inline void load_dimacs(Solver& solver, const DimacsProblem& p) {
  while (solver.num_vars() < p.num_vars) solver.new_var();
  for (const auto& c : p.clauses)
    if (!solver.add_clause(c)) return;
}

}  // namespace mapfsat
