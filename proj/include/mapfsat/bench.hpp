#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "mapfsat/csv.hpp"
#include "mapfsat/render.hpp"
#include "mapfsat/solvers.hpp"

namespace mapfsat {

// Benchmark sweep over (agent count, algorithm, preset) cells on one
// map/scenario pair, one CSV row per cell. Timeouts are data, not errors.
struct RunSpec {
  std::string map_path;
  std::string scen_path;
  std::vector<int> agent_counts;
  std::vector<std::string> algos = {"mddsat", "smtcbs", "dpllmapf"};
  std::vector<DpllConfig> presets = {DpllConfig::preset("1/2 3/4")};
  double timeout_seconds = 30;
  int xi_cap = -1;
  std::optional<uint32_t> shuffle_seed;
  std::string out_path;          // empty = stdout
  bool cross_check = false;
  std::string dump_dimacs_dir;   // empty = off
  bool render = false;
  bool refine_first_only = false;
};

namespace detail {

inline std::string sanitize_name(std::string base) {
  for (char& c : base)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
      c = '_';
  return base;
}

inline std::string file_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

}  // namespace detail

// Exit codes: 0 clean sweep, 2 parse error, 3 cross-check disagreement.
inline int run_benchmark(const RunSpec& spec, std::ostream& log = std::cerr) {
  GridMap map;
  std::vector<ScenarioEntry> entries;
  try {
    map = load_map(spec.map_path);
    entries = load_scen(spec.scen_path);
  } catch (const ParseError& e) {
    log << "parse error in "
        << (std::string(e.what()).find("scen") != std::string::npos
                ? spec.scen_path
                : spec.map_path)
        << ": " << e.what() << "\n";
    return 2;
  }
  if (spec.shuffle_seed) shuffle_entries(entries, *spec.shuffle_seed);

  std::ofstream out_file;
  if (!spec.out_path.empty()) {
    out_file.open(spec.out_path);
    if (!out_file) {
      log << "cannot open output file " << spec.out_path << "\n";
      return 2;
    }
  }
  std::ostream& out = spec.out_path.empty() ? std::cout : out_file;
  CsvWriter csv(out);

  const std::string map_name = detail::file_stem(spec.map_path);
  const std::string scen_name = detail::file_stem(spec.scen_path);
  bool disagreement = false;

  for (int k : spec.agent_counts) {
    BuiltInstance built;
    try {
      built = build_instance(map, entries, k);
    } catch (const InstanceError& e) {
      log << "skipping k=" << k << ": " << e.what() << "\n";
      continue;
    }

    std::map<std::string, SolveOutcome> outcomes;
    bool rendered = false;
    auto run_cell = [&](const std::string& algo, const std::string& preset,
                        const DpllConfig* cfg) {
      SolverOptions opt;
      opt.timeout_seconds = spec.timeout_seconds;
      opt.xi_cap = spec.xi_cap;
      opt.refine_first_only = spec.refine_first_only;
      if (!spec.dump_dimacs_dir.empty()) {
        std::filesystem::create_directories(spec.dump_dimacs_dir);
        std::string prefix = spec.dump_dimacs_dir + "/" +
                             detail::sanitize_name(map_name) + "_k" +
                             std::to_string(k) + "_" + algo +
                             (preset.empty()
                                  ? std::string()
                                  : "_" + detail::sanitize_name(preset));
        opt.model_observer = [prefix](const BooleanModel& model) {
          std::ofstream dump(prefix + "_xi" + std::to_string(model.xi) +
                             ".cnf");
          write_model_dimacs(dump, model);
        };
      }

      auto t0 = std::chrono::steady_clock::now();
      SolveOutcome outcome;
      if (algo == "mddsat") outcome = mdd_sat(built.instance, opt);
      else if (algo == "smtcbs") outcome = smt_cbs(built.instance, opt);
      else outcome = dpll_mapf(built.instance, *cfg, opt);
      double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();

      ResultRecord row;
      row.map = map_name;
      row.scen = scen_name;
      row.k = k;
      row.algo = algo;
      row.preset = preset;
      row.status = to_string(outcome.status);
      row.xi = outcome.xi;
      row.runtime_s = seconds;
      row.sat_consultations = outcome.stats.sat_consultations;
      row.consistency_checks = outcome.stats.consistency_checks;
      row.conflicts_refined = outcome.stats.conflicts_refined;
      row.decisions = outcome.stats.decisions;
      row.propagations = outcome.stats.propagations;
      row.clauses_final = outcome.stats.clauses_final;
      csv.write(row);
      out.flush();

      if (spec.render && !rendered && outcome.solution) {
        rendered = true;
        auto frames = render_solution(*outcome.solution, map, built.grid);
        for (size_t t = 0; t < frames.size(); ++t)
          log << "k=" << k << " t=" << t << "\n" << frames[t];
      }
      outcomes[algo + (preset.empty() ? "" : "/" + preset)] =
          std::move(outcome);
    };

    for (const std::string& algo : spec.algos) {
      if (algo == "dpllmapf") {
        for (const DpllConfig& cfg : spec.presets)
          run_cell(algo, cfg.name, &cfg);
      } else {
        run_cell(algo, "", nullptr);
      }
    }

    if (spec.cross_check) {
      std::optional<int> solved_xi;
      for (const auto& [name, outcome] : outcomes) {
        if (outcome.status != SolveStatus::Solved) continue;
        if (!solved_xi) {
          solved_xi = *outcome.xi;
        } else if (*solved_xi != *outcome.xi) {
          log << "cross-check disagreement at k=" << k << ": " << name
              << " reports xi=" << *outcome.xi << ", expected " << *solved_xi
              << "\n";
          disagreement = true;
        }
      }
    }
  }
  return disagreement ? 3 : 0;
}

}  // namespace mapfsat
