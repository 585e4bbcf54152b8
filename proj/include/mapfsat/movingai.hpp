#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mapfsat/instance.hpp"

namespace mapfsat {

// movingai.com benchmark formats: .map (octile grid) and .scen version 1.

enum class ParseErrorKind {
  HeaderMismatch,
  UnknownTerrainChar,
  RaggedRow,
  BadVersion,
  FieldCount,
  NonNumericField,
  Io,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        kind_(kind),
        line_(line) {}
  ParseErrorKind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  ParseErrorKind kind_;
  int line_;
};

struct GridMap {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> passable;  // row-major, height*width

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  bool is_passable(int x, int y) const {
    return in_bounds(x, y) && passable[static_cast<size_t>(y) * width + x];
  }
  int passable_count() const {
    int n = 0;
    for (uint8_t p : passable) n += p;
    return n;
  }
};

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == '\t' || line[i] == ' ')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != '\t' && line[j] != ' ') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view s, int line) {
  T value{};
  if constexpr (std::is_integral_v<T>) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ParseError(ParseErrorKind::NonNumericField, line,
                       "expected integer, got '" + std::string(s) + "'");
  } else {
    // from_chars for double is unreliable pre-gcc11 for all locales; stod
    // on a bounded copy is fine here.
    try {
      size_t used = 0;
      std::string copy(s);
      value = std::stod(copy, &used);
      if (used != copy.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(ParseErrorKind::NonNumericField, line,
                       "expected number, got '" + std::string(s) + "'");
    }
  }
  return value;
}

}  // namespace detail

// Parses the movingai .map format:
//   type octile / height H / width W / map / H rows of W terrain chars.
// Passable terrain: . G S; blocked terrain: @ O T W.
inline GridMap parse_map(std::string_view text) {
  auto lines = detail::split_lines(text);
  auto header = [&](size_t idx, std::string_view key) -> std::string_view {
    if (idx >= lines.size())
      throw ParseError(ParseErrorKind::HeaderMismatch, static_cast<int>(idx + 1),
                       "missing header line '" + std::string(key) + "'");
    auto fields = detail::split_fields(lines[idx]);
    if (fields.empty() || fields[0] != key)
      throw ParseError(ParseErrorKind::HeaderMismatch, static_cast<int>(idx + 1),
                       "expected header '" + std::string(key) + "'");
    return fields.size() > 1 ? fields[1] : std::string_view{};
  };

  if (header(0, "type") != "octile")
    throw ParseError(ParseErrorKind::HeaderMismatch, 1, "expected 'type octile'");
  GridMap m;
  m.height = detail::parse_number<int>(header(1, "height"), 2);
  m.width = detail::parse_number<int>(header(2, "width"), 3);
  header(3, "map");
  if (m.height <= 0 || m.width <= 0)
    throw ParseError(ParseErrorKind::HeaderMismatch, 2, "non-positive dimensions");

  if (static_cast<int>(lines.size()) - 4 != m.height)
    throw ParseError(ParseErrorKind::HeaderMismatch, static_cast<int>(lines.size()),
                     "expected " + std::to_string(m.height) + " map rows, got " +
                         std::to_string(lines.size() - 4));

  m.passable.assign(static_cast<size_t>(m.width) * m.height, 0);
  for (int y = 0; y < m.height; ++y) {
    const int line_no = 5 + y;
    std::string_view row = lines[4 + y];
    if (static_cast<int>(row.size()) != m.width)
      throw ParseError(ParseErrorKind::RaggedRow, line_no,
                       "row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(m.width));
    for (int x = 0; x < m.width; ++x) {
      char c = row[x];
      bool open;
      switch (c) {
        case '.': case 'G': case 'S': open = true; break;
        case '@': case 'O': case 'T': case 'W': open = false; break;
        default:
          throw ParseError(ParseErrorKind::UnknownTerrainChar, line_no,
                           std::string("unknown terrain character '") + c + "'");
      }
      m.passable[static_cast<size_t>(y) * m.width + x] = open;
    }
  }
  return m;
}

// Graph over passable cells, 4-connected, with the cell<->vertex mapping.
struct GridGraph {
  Graph graph;
  std::vector<int> cell_to_vertex;              // width*height, -1 for blocked
  std::vector<std::pair<int, int>> vertex_to_cell;  // (x, y) per vertex
  int width = 0, height = 0;

  int vertex_at(int x, int y) const {
    return cell_to_vertex[static_cast<size_t>(y) * width + x];
  }
};

inline GridGraph grid_to_graph(const GridMap& m) {
  GridGraph gg;
  gg.width = m.width;
  gg.height = m.height;
  gg.cell_to_vertex.assign(static_cast<size_t>(m.width) * m.height, -1);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.is_passable(x, y)) {
        gg.cell_to_vertex[static_cast<size_t>(y) * m.width + x] =
            static_cast<int>(gg.vertex_to_cell.size());
        gg.vertex_to_cell.emplace_back(x, y);
      }
  gg.graph = Graph(static_cast<int>(gg.vertex_to_cell.size()));
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      if (!m.is_passable(x, y)) continue;
      int v = gg.vertex_at(x, y);
      if (m.is_passable(x + 1, y)) gg.graph.add_edge(v, gg.vertex_at(x + 1, y));
      if (m.is_passable(x, y + 1)) gg.graph.add_edge(v, gg.vertex_at(x, y + 1));
    }
  return gg;
}

struct ScenarioEntry {
  int bucket = 0;
  std::string map_name;
  int map_width = 0, map_height = 0;
  int start_x = 0, start_y = 0;
  int goal_x = 0, goal_y = 0;
  double reference_length = 0.0;  // octile distance, informational only
};

// Parses a movingai .scen version-1 file: a "version 1" header followed by
// rows of 9 whitespace-separated fields.
inline std::vector<ScenarioEntry> parse_scen(std::string_view text) {
  auto lines = detail::split_lines(text);
  if (lines.empty())
    throw ParseError(ParseErrorKind::BadVersion, 1, "empty scenario file");
  {
    auto fields = detail::split_fields(lines[0]);
    if (fields.size() != 2 || fields[0] != "version" || fields[1] != "1")
      throw ParseError(ParseErrorKind::BadVersion, 1,
                       "expected 'version 1' header");
  }
  std::vector<ScenarioEntry> entries;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const int line_no = static_cast<int>(i + 1);
    auto f = detail::split_fields(lines[i]);
    if (f.size() != 9)
      throw ParseError(ParseErrorKind::FieldCount, line_no,
                       "expected 9 fields, got " + std::to_string(f.size()));
    ScenarioEntry e;
    e.bucket = detail::parse_number<int>(f[0], line_no);
    e.map_name = std::string(f[1]);
    e.map_width = detail::parse_number<int>(f[2], line_no);
    e.map_height = detail::parse_number<int>(f[3], line_no);
    e.start_x = detail::parse_number<int>(f[4], line_no);
    e.start_y = detail::parse_number<int>(f[5], line_no);
    e.goal_x = detail::parse_number<int>(f[6], line_no);
    e.goal_y = detail::parse_number<int>(f[7], line_no);
    e.reference_length = detail::parse_number<double>(f[8], line_no);
    entries.push_back(std::move(e));
  }
  return entries;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseErrorKind::Io, 0, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline GridMap load_map(const std::string& path) {
  return parse_map(read_file(path));
}
inline std::vector<ScenarioEntry> load_scen(const std::string& path) {
  return parse_scen(read_file(path));
}

// Deterministic Fisher-Yates permutation of scenario entries, mt19937
// seeded with `seed` and index drawn as gen() % (i + 1).
inline void shuffle_entries(std::vector<ScenarioEntry>& entries, uint32_t seed) {
  std::mt19937 gen(seed);
  for (size_t i = entries.size(); i > 1; --i) {
    size_t j = gen() % i;
    std::swap(entries[i - 1], entries[j]);
  }
}

enum class InstanceErrorKind {
  DuplicateStart,
  DuplicateGoal,
  BlockedCell,
  BadAgentCount,
};

class InstanceError : public std::runtime_error {
 public:
  InstanceError(InstanceErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  InstanceErrorKind kind() const { return kind_; }

 private:
  InstanceErrorKind kind_;
};

struct BuiltInstance {
  GridGraph grid;
  MapfInstance instance;
};

// Builds a k-agent instance from the first k scenario entries (the
// standard movingai evaluation protocol).
inline BuiltInstance build_instance(const GridMap& m,
                                    const std::vector<ScenarioEntry>& entries,
                                    int k) {
  if (k <= 0)
    throw InstanceError(InstanceErrorKind::BadAgentCount,
                        "at least one agent required");
  if (k > static_cast<int>(entries.size()))
    throw InstanceError(InstanceErrorKind::BadAgentCount,
                        "requested " + std::to_string(k) + " agents but scenario has " +
                            std::to_string(entries.size()) + " entries");
  BuiltInstance built;
  built.grid = grid_to_graph(m);
  built.instance.graph = built.grid.graph;
  std::unordered_set<long> starts, goals;
  for (int i = 0; i < k; ++i) {
    const ScenarioEntry& e = entries[i];
    auto cell = [&](int x, int y, const char* what) -> int {
      if (!m.is_passable(x, y))
        throw InstanceError(InstanceErrorKind::BlockedCell,
                            std::string(what) + " cell (" + std::to_string(x) + "," +
                                std::to_string(y) + ") of entry " + std::to_string(i) +
                                " is blocked or out of bounds");
      return built.grid.vertex_at(x, y);
    };
    int s = cell(e.start_x, e.start_y, "start");
    int g = cell(e.goal_x, e.goal_y, "goal");
    if (!starts.insert(s).second)
      throw InstanceError(InstanceErrorKind::DuplicateStart,
                          "duplicate start cell in first " + std::to_string(k) +
                              " scenario entries");
    if (!goals.insert(g).second)
      throw InstanceError(InstanceErrorKind::DuplicateGoal,
                          "duplicate goal cell in first " + std::to_string(k) +
                              " scenario entries");
    built.instance.start.push_back(s);
    built.instance.goal.push_back(g);
  }
  return built;
}

}  // namespace mapfsat
