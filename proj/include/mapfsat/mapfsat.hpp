#pragma once

// Umbrella header for the mapfsat library: SAT-based optimal multi-agent
// path finding with eager (MDD-SAT), lazy (SMT-CBS) and integrated
// (DPLL(MAPF)) solving strategies on a built-in CDCL engine.

#include "mapfsat/bench.hpp"
#include "mapfsat/csv.hpp"
#include "mapfsat/encoding.hpp"
#include "mapfsat/graph.hpp"
#include "mapfsat/instance.hpp"
#include "mapfsat/mdd.hpp"
#include "mapfsat/movingai.hpp"
#include "mapfsat/oracle.hpp"
#include "mapfsat/render.hpp"
#include "mapfsat/sat.hpp"
#include "mapfsat/solution.hpp"
#include "mapfsat/solvers.hpp"
