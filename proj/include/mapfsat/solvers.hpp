#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mapfsat/encoding.hpp"
#include "mapfsat/oracle.hpp"

namespace mapfsat {

enum class SolveStatus { Solved, Unsolvable, Timeout, XiCapReached };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "SOLVED";
    case SolveStatus::Unsolvable: return "UNSOLVABLE";
    case SolveStatus::Timeout: return "TIMEOUT";
    case SolveStatus::XiCapReached: return "XI_CAP";
  }
  return "?";
}

struct SolveStats {
  uint64_t sat_consultations = 0;
  uint64_t consistency_checks = 0;
  uint64_t consistency_checks_partial = 0;
  uint64_t conflicts_refined = 0;
  uint64_t conflicts_refined_partial = 0;
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t sat_conflicts = 0;
  uint64_t restarts = 0;
  uint64_t clauses_final = 0;
  std::vector<std::pair<int, double>> per_xi_runtime;  // (xi, seconds)
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Timeout;
  std::optional<Solution> solution;
  std::optional<int> xi;
  SolveStats stats;
};

struct SolverOptions {
  double timeout_seconds = 0;  // 0 = unlimited
  uint64_t max_conflicts = 0;  // 0 = unlimited
  int xi_cap = -1;             // absolute cap; -1 = xi0 + |V| * k
  bool refine_first_only = false;
  // Called with each encoded model before solving (DIMACS dumps etc.).
  std::function<void(const BooleanModel&)> model_observer;
};

// Check-point schedule for DPLL(MAPF): assignment fractions at which the
// consistency check runs on the partial assignment. The final check at a
// complete assignment is always implied.
struct DpllConfig {
  std::string name;
  std::vector<double> check_points;

  static DpllConfig preset(const std::string& name) {
    if (name == "1/2 3/4") return {name, {0.5, 0.75}};
    if (name == "1/3 2/3") return {name, {1.0 / 3, 2.0 / 3}};
    if (name == "2/3") return {name, {2.0 / 3}};
    if (name == "final-only" || name.empty()) return {"final-only", {}};
    throw std::invalid_argument("unknown DPLL preset '" + name + "'");
  }
};

namespace detail {

struct XiLoop {
  int xi0 = 0;
  int cap = 0;
  DistanceTable dists;
  Budget budget;
  std::chrono::steady_clock::time_point start;

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
  bool deadline_passed() const {
    return budget.deadline &&
           std::chrono::steady_clock::now() >= *budget.deadline;
  }
};

// Computes distances, xi0 and the termination cap. Returns false (and
// fills the outcome) when some agent's goal is unreachable.
inline bool init_xi_loop(const MapfInstance& inst, const SolverOptions& opt,
                         XiLoop& loop, SolveOutcome& out) {
  auto violations = validate_instance(inst);
  if (!violations.empty())
    throw std::invalid_argument("invalid instance: " + violations.front());
  loop.start = std::chrono::steady_clock::now();
  if (opt.timeout_seconds > 0)
    loop.budget = Budget::with_timeout(opt.timeout_seconds);
  loop.budget.max_conflicts = opt.max_conflicts;
  try {
    loop.dists = all_distances(inst);
  } catch (const GoalUnreachable&) {
    out.status = SolveStatus::Unsolvable;
    return false;
  }
  loop.xi0 = sum_of_costs_lower_bound(inst, loop.dists);
  loop.cap = opt.xi_cap >= 0
                 ? opt.xi_cap
                 : loop.xi0 + inst.graph.vertex_count() * inst.agent_count();
  return true;
}

inline void merge_sat_stats(SolveStats& stats, const SolverStats& s) {
  stats.decisions += s.decisions;
  stats.propagations += s.propagations;
  stats.sat_conflicts += s.conflicts;
  stats.restarts += s.restarts;
}

inline void check_solved_invariants(const SolveOutcome& out,
                                    const MapfInstance& inst) {
  if (!out.solution || !out.xi)
    throw std::logic_error("solved outcome without solution");
  if (!is_valid_solution(*out.solution, inst))
    throw std::logic_error("solver produced an invalid solution");
  if (sum_of_costs(*out.solution) != *out.xi)
    throw std::logic_error("solution cost disagrees with reported xi");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// MDD-SAT: eager complete encoding, one SAT consultation per xi.
// ---------------------------------------------------------------------------

inline SolveOutcome mdd_sat(const MapfInstance& inst,
                            const SolverOptions& opt = {}) {
  SolveOutcome out;
  detail::XiLoop loop;
  if (!detail::init_xi_loop(inst, opt, loop, out)) return out;

  for (int xi = loop.xi0; xi <= loop.cap; ++xi) {
    if (loop.deadline_passed()) {
      out.status = SolveStatus::Timeout;
      return out;
    }
    double t0 = loop.elapsed();
    BooleanModel model =
        encode_complete(inst, build_mdds(inst, loop.dists, xi - loop.xi0), xi);
    if (opt.model_observer) opt.model_observer(model);
    ++out.stats.sat_consultations;
    SolveResult res = model.solver.solve(nullptr, loop.budget);
    detail::merge_sat_stats(out.stats, model.solver.stats());
    out.stats.clauses_final = model.clause_count();
    out.stats.per_xi_runtime.emplace_back(xi, loop.elapsed() - t0);
    if (res == SolveResult::Budget) {
      out.status = SolveStatus::Timeout;
      return out;
    }
    if (res == SolveResult::Sat) {
      out.solution = extract_solution(model.solver, model.varmap);
      out.xi = xi;
      out.status = SolveStatus::Solved;
      detail::check_solved_invariants(out, inst);
      return out;
    }
  }
  out.status = SolveStatus::XiCapReached;
  return out;
}

// ---------------------------------------------------------------------------
// SMT-CBS: lazy incomplete encoding with external refinement. The inner
// level consults the solver to a total assignment, checks consistency and
// refines until consistent or UNSAT; the conflict set persists across xi.
// ---------------------------------------------------------------------------

inline SolveOutcome smt_cbs(const MapfInstance& inst,
                            const SolverOptions& opt = {}) {
  SolveOutcome out;
  detail::XiLoop loop;
  if (!detail::init_xi_loop(inst, opt, loop, out)) return out;

  std::set<Conflict> conflicts;
  for (int xi = loop.xi0; xi <= loop.cap; ++xi) {
    if (loop.deadline_passed()) {
      out.status = SolveStatus::Timeout;
      return out;
    }
    double t0 = loop.elapsed();
    BooleanModel model = encode_incomplete(
        conflicts, inst, build_mdds(inst, loop.dists, xi - loop.xi0), xi);
    if (opt.model_observer) opt.model_observer(model);

    for (;;) {
      ++out.stats.sat_consultations;
      SolveResult res = model.solver.solve(nullptr, loop.budget);
      if (res == SolveResult::Budget) {
        detail::merge_sat_stats(out.stats, model.solver.stats());
        out.status = SolveStatus::Timeout;
        return out;
      }
      if (res == SolveResult::Unsat) break;

      Solution candidate = extract_solution(model.solver, model.varmap);
      ++out.stats.consistency_checks;
      ConsistencyReport report = check_consistency(candidate, inst);
      if (!report.structural_errors.empty())
        throw std::logic_error("extracted solution is structurally broken: " +
                               report.structural_errors.front());
      if (report.conflicts.empty()) {
        detail::merge_sat_stats(out.stats, model.solver.stats());
        out.stats.clauses_final = model.clause_count();
        out.stats.per_xi_runtime.emplace_back(xi, loop.elapsed() - t0);
        out.solution = std::move(candidate);
        out.xi = xi;
        out.status = SolveStatus::Solved;
        detail::check_solved_invariants(out, inst);
        return out;
      }
      std::vector<Conflict> batch = report.conflicts;
      if (opt.refine_first_only) batch.resize(1);
      size_t added = refine(model, batch);
      if (added == 0)
        throw std::logic_error("refinement made no progress");
      out.stats.conflicts_refined += added;
    }
    detail::merge_sat_stats(out.stats, model.solver.stats());
    out.stats.clauses_final = model.clause_count();
    out.stats.per_xi_runtime.emplace_back(xi, loop.elapsed() - t0);
    conflicts = model.incorporated;
  }
  out.status = SolveStatus::XiCapReached;
  return out;
}

// ---------------------------------------------------------------------------
// DPLL(MAPF): the consistency check runs inside the CDCL search loop, on
// partial assignments at the configured check points, injecting
// collision-avoidance clauses with the search continuing uninterrupted.
// ---------------------------------------------------------------------------

// DECIDE_MAPF as a theory hook: extracts the partial solution from the
// assignment view, reports collisions between decided path fragments, and
// returns their refinement clauses.
class MapfConsistencyHook : public TheoryHook {
 public:
  MapfConsistencyHook(const MapfInstance& inst, const VarMap& vm,
                      std::set<Conflict>& incorporated,
                      std::vector<double> schedule, bool first_only)
      : inst_(inst), vm_(vm), incorporated_(incorporated),
        first_only_(first_only) {
    check_points = std::move(schedule);
  }

  std::vector<std::vector<Lit>> check(const AssignmentView& view) override {
    PartialPaths partial = extract_partial_solution(view, vm_);
    ConsistencyReport report = check_consistency(partial, inst_);
    std::vector<std::vector<Lit>> clauses;
    for (const Conflict& c : report.conflicts) {
      if (incorporated_.count(c)) continue;
      auto clause = refinement_clause(vm_, c);
      if (!clause) continue;
      incorporated_.insert(c);
      clauses.push_back(std::move(*clause));
      if (first_only_) break;
    }
    if (!view.complete()) refined_partial += clauses.size();
    return clauses;
  }

  uint64_t refined_partial = 0;

 private:
  const MapfInstance& inst_;
  const VarMap& vm_;
  std::set<Conflict>& incorporated_;
  bool first_only_;
};

inline SolveOutcome dpll_mapf(const MapfInstance& inst, const DpllConfig& cfg,
                              const SolverOptions& opt = {}) {
  for (size_t i = 0; i < cfg.check_points.size(); ++i) {
    double f = cfg.check_points[i];
    if (f <= 0.0 || f > 1.0)
      throw std::invalid_argument("check point fraction outside (0, 1]");
    if (i > 0 && f <= cfg.check_points[i - 1])
      throw std::invalid_argument("check points must be strictly increasing");
  }
  SolveOutcome out;
  detail::XiLoop loop;
  if (!detail::init_xi_loop(inst, opt, loop, out)) return out;

  std::set<Conflict> conflicts;
  for (int xi = loop.xi0; xi <= loop.cap; ++xi) {
    if (loop.deadline_passed()) {
      out.status = SolveStatus::Timeout;
      return out;
    }
    double t0 = loop.elapsed();
    BooleanModel model = encode_incomplete(
        conflicts, inst, build_mdds(inst, loop.dists, xi - loop.xi0), xi);
    if (opt.model_observer) opt.model_observer(model);

    MapfConsistencyHook hook(inst, model.varmap, model.incorporated,
                             cfg.check_points, opt.refine_first_only);
    ++out.stats.sat_consultations;
    SolveResult res = model.solver.solve(&hook, loop.budget);

    const SolverStats& ss = model.solver.stats();
    detail::merge_sat_stats(out.stats, ss);
    out.stats.consistency_checks += ss.hook_checks;
    out.stats.consistency_checks_partial += ss.hook_checks_partial;
    out.stats.conflicts_refined += ss.theory_added;
    out.stats.conflicts_refined_partial += hook.refined_partial;
    out.stats.clauses_final = model.clause_count();
    out.stats.per_xi_runtime.emplace_back(xi, loop.elapsed() - t0);

    if (res == SolveResult::Budget) {
      out.status = SolveStatus::Timeout;
      return out;
    }
    if (res == SolveResult::Sat) {
      out.solution = extract_solution(model.solver, model.varmap);
      out.xi = xi;
      out.status = SolveStatus::Solved;
      detail::check_solved_invariants(out, inst);
      return out;
    }
    conflicts = model.incorporated;
  }
  out.status = SolveStatus::XiCapReached;
  return out;
}

// ---------------------------------------------------------------------------
// Cross-check: all three solvers plus the joint-state oracle (when the
// instance is small enough) must agree on the optimum.
// ---------------------------------------------------------------------------

struct CrossCheckReport {
  SolveOutcome mddsat;
  SolveOutcome smtcbs;
  std::vector<std::pair<std::string, SolveOutcome>> dpll;
  std::optional<OracleResult> oracle;
  bool agree = true;
  std::string diagnostic;
};

inline CrossCheckReport cross_check(const MapfInstance& inst,
                                    const SolverOptions& opt = {},
                                    uint64_t oracle_state_cap = 4'000'000) {
  CrossCheckReport report;
  report.mddsat = mdd_sat(inst, opt);
  report.smtcbs = smt_cbs(inst, opt);
  for (const char* name : {"1/2 3/4", "1/3 2/3", "2/3"})
    report.dpll.emplace_back(name,
                             dpll_mapf(inst, DpllConfig::preset(name), opt));

  // Rough joint-state size estimate gates the oracle.
  double states = 1.0;
  for (int a = 0; a < inst.agent_count(); ++a)
    states *= inst.graph.vertex_count();
  states *= std::max(1, inst.agent_count());
  if (states <= static_cast<double>(oracle_state_cap))
    report.oracle = joint_state_optimum(inst, oracle_state_cap);

  std::ostringstream diag;
  std::optional<int> expected;
  bool expect_unsolvable = false;
  if (report.oracle && !report.oracle->exhausted_cap) {
    if (report.oracle->solvable)
      expected = report.oracle->optimal_soc;
    else
      expect_unsolvable = true;
  }

  auto consider = [&](const std::string& name, const SolveOutcome& o) {
    if (o.status == SolveStatus::Timeout) {
      diag << name << ": timeout (inconclusive); ";
      return;
    }
    if (o.status == SolveStatus::Solved) {
      if (expect_unsolvable) {
        report.agree = false;
        diag << name << ": solved an oracle-unsolvable instance; ";
      } else if (!expected) {
        expected = *o.xi;
      } else if (*expected != *o.xi) {
        report.agree = false;
        diag << name << ": xi=" << *o.xi << " != expected " << *expected
             << "; ";
      }
    } else if (expected) {
      report.agree = false;
      diag << name << ": " << to_string(o.status)
           << " but optimum " << *expected << " exists; ";
    }
  };
  consider("mddsat", report.mddsat);
  consider("smtcbs", report.smtcbs);
  for (auto& [name, outcome] : report.dpll)
    consider("dpllmapf[" + name + "]", outcome);
  report.diagnostic = diag.str();
  return report;
}

}  // namespace mapfsat
