#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace mapfsat {

// One benchmark measurement, serialized as an RFC-4180-style CSV row.
struct ResultRecord {
  std::string map;
  std::string scen;
  int k = 0;
  std::string algo;
  std::string preset;            // empty for non-DPLL algorithms
  std::string status;            // SOLVED, TIMEOUT, UNSOLVABLE, XI_CAP
  std::optional<int> xi;         // empty unless solved
  double runtime_s = 0.0;
  uint64_t sat_consultations = 0;
  uint64_t consistency_checks = 0;
  uint64_t conflicts_refined = 0;
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t clauses_final = 0;
};

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  static std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    quoted += '"';
    return quoted;
  }

  void write(const ResultRecord& r) {
    if (!header_written_) {
      out_ << "map,scen,k,algo,preset,status,xi,runtime_s,sat_consultations,"
              "consistency_checks,conflicts_refined,decisions,propagations,"
              "clauses_final\n";
      header_written_ = true;
    }
    char runtime[32];
    std::snprintf(runtime, sizeof runtime, "%.3f", r.runtime_s);
    out_ << escape(r.map) << ',' << escape(r.scen) << ',' << r.k << ','
         << escape(r.algo) << ',' << escape(r.preset) << ',' << escape(r.status)
         << ',' << (r.xi ? std::to_string(*r.xi) : std::string()) << ','
         << runtime << ',' << r.sat_consultations << ',' << r.consistency_checks
         << ',' << r.conflicts_refined << ',' << r.decisions << ','
         << r.propagations << ',' << r.clauses_final << '\n';
  }

 private:
  std::ostream& out_;
  bool header_written_ = false;
};

}  // namespace mapfsat
