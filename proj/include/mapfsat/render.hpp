#pragma once

#include <string>
#include <vector>

#include "mapfsat/movingai.hpp"
#include "mapfsat/solution.hpp"

namespace mapfsat {

// Display symbol for agent index i (1-based digits, then letters).
inline char agent_symbol(int i) {
  if (i < 9) return static_cast<char>('1' + i);
  if (i < 9 + 26) return static_cast<char>('a' + (i - 9));
  if (i < 9 + 52) return static_cast<char>('A' + (i - 35));
  return '*';
}

// One ASCII grid per timestep with agents overlaid on the map; blocked
// cells are '@', free cells '.'. Deterministic.
inline std::vector<std::string> render_solution(const Solution& sol,
                                                const GridMap& map,
                                                const GridGraph& grid) {
  std::vector<std::string> frames;
  for (int t = 0; t <= sol.horizon(); ++t) {
    std::string frame;
    std::vector<char> cells(static_cast<size_t>(map.width) * map.height);
    for (int y = 0; y < map.height; ++y)
      for (int x = 0; x < map.width; ++x)
        cells[static_cast<size_t>(y) * map.width + x] =
            map.is_passable(x, y) ? '.' : '@';
    for (int a = 0; a < sol.agent_count(); ++a) {
      auto [x, y] = grid.vertex_to_cell[sol.paths[a][t]];
      cells[static_cast<size_t>(y) * map.width + x] = agent_symbol(a);
    }
    for (int y = 0; y < map.height; ++y) {
      frame.append(cells.begin() + static_cast<size_t>(y) * map.width,
                   cells.begin() + static_cast<size_t>(y + 1) * map.width);
      frame += '\n';
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace mapfsat
