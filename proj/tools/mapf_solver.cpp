// Benchmark harness CLI: sweeps MAPF solver configurations over a
// movingai map/scenario pair and writes one CSV row per cell.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mapfsat/mapfsat.hpp"

namespace {

// "3", "1,3,5" or "1..8"
std::vector<int> parse_agent_counts(const std::string& text) {
  std::vector<int> counts;
  auto dots = text.find("..");
  if (dots != std::string::npos) {
    int lo = std::stoi(text.substr(0, dots));
    int hi = std::stoi(text.substr(dots + 2));
    for (int k = lo; k <= hi; ++k) counts.push_back(k);
    return counts;
  }
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    counts.push_back(std::stoi(text.substr(start, comma - start)));
    start = comma + 1;
    if (comma == text.size()) break;
  }
  return counts;
}

double parse_fraction(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return std::stod(text);
  return std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1));
}

// Semicolon-separated presets, each a comma-separated fraction list:
// "1/2,3/4;2/3" yields two schedules. "final" is the empty schedule.
std::vector<mapfsat::DpllConfig> parse_presets(const std::string& text) {
  std::vector<mapfsat::DpllConfig> presets;
  size_t start = 0;
  while (start <= text.size()) {
    size_t semi = text.find(';', start);
    if (semi == std::string::npos) semi = text.size();
    std::string chunk = text.substr(start, semi - start);
    mapfsat::DpllConfig cfg;
    cfg.name = chunk;
    if (chunk != "final" && !chunk.empty()) {
      size_t p = 0;
      while (p <= chunk.size()) {
        size_t comma = chunk.find(',', p);
        if (comma == std::string::npos) comma = chunk.size();
        cfg.check_points.push_back(parse_fraction(chunk.substr(p, comma - p)));
        p = comma + 1;
        if (comma == chunk.size()) break;
      }
    }
    presets.push_back(std::move(cfg));
    start = semi + 1;
    if (semi == text.size()) break;
  }
  return presets;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "SAT-based optimal MAPF solvers (MDD-SAT, SMT-CBS, DPLL(MAPF)) over "
      "movingai benchmarks"};

  std::string map_path, scen_path, out_path, agents_text = "1";
  std::string algos_text = "mddsat,smtcbs,dpllmapf";
  std::string presets_text = "1/2,3/4";
  std::string dump_dir;
  double timeout = 30;
  int xi_cap = -1;
  std::optional<uint32_t> shuffle_seed;
  bool cross = false, render = false, refine_first = false;

  app.add_option("--map", map_path, "movingai .map file")->required();
  app.add_option("--scen", scen_path, "movingai .scen (version 1) file")
      ->required();
  app.add_option("--agents", agents_text,
                 "agent counts: N, lo..hi, or comma list (default 1)");
  app.add_option("--algos", algos_text,
                 "comma list of mddsat,smtcbs,dpllmapf or 'all'");
  app.add_option("--presets", presets_text,
                 "DPLL check-point schedules, e.g. '1/2,3/4;2/3' or 'final'");
  app.add_option("--timeout", timeout, "seconds per cell (default 30)");
  app.add_option("--xi-cap", xi_cap,
                 "absolute sum-of-costs cap (default xi0 + |V|*k)");
  app.add_option("--shuffle", shuffle_seed,
                 "permute scenario entries with this seed before selection");
  app.add_option("--out", out_path, "CSV output path (default stdout)");
  app.add_flag("--cross-check", cross,
               "exit 3 if solved cells disagree on the optimum");
  app.add_option("--dump-dimacs", dump_dir,
                 "write each encoded model as DIMACS CNF into this directory");
  app.add_flag("--render", render,
               "print ASCII frames of one solved plan per agent count");
  app.add_flag("--refine-first-only", refine_first,
               "refine only the first collision per consistency check");

  CLI11_PARSE(app, argc, argv);

  mapfsat::RunSpec spec;
  spec.map_path = map_path;
  spec.scen_path = scen_path;
  spec.out_path = out_path;
  spec.timeout_seconds = timeout;
  spec.xi_cap = xi_cap;
  spec.shuffle_seed = shuffle_seed;
  spec.cross_check = cross;
  spec.dump_dimacs_dir = dump_dir;
  spec.render = render;
  spec.refine_first_only = refine_first;

  try {
    spec.agent_counts = parse_agent_counts(agents_text);
    spec.presets = parse_presets(presets_text);
  } catch (const std::exception& e) {
    std::cerr << "bad option value: " << e.what() << "\n";
    return 2;
  }
  spec.algos.clear();
  if (algos_text == "all") {
    spec.algos = {"mddsat", "smtcbs", "dpllmapf"};
  } else {
    size_t start = 0;
    while (start <= algos_text.size()) {
      size_t comma = algos_text.find(',', start);
      if (comma == std::string::npos) comma = algos_text.size();
      std::string algo = algos_text.substr(start, comma - start);
      if (algo != "mddsat" && algo != "smtcbs" && algo != "dpllmapf") {
        std::cerr << "unknown algorithm '" << algo << "'\n";
        return 2;
      }
      spec.algos.push_back(algo);
      start = comma + 1;
      if (comma == algos_text.size()) break;
    }
  }
  for (int k : spec.agent_counts)
    if (k <= 0) {
      std::cerr << "agent counts must be positive\n";
      return 2;
    }
  if (timeout <= 0) {
    std::cerr << "timeout must be positive\n";
    return 2;
  }

  try {
    return mapfsat::run_benchmark(spec);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
