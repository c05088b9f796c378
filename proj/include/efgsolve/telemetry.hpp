#pragma once

// Convergence telemetry shared by all solvers. The unit of work is the tree
// traversal: one A*v or A^T*v product for the first-order solvers, one full
// tree pass for the regret solvers. Residual evaluations done for telemetry
// are excluded from the count so the x-axis stays comparable.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace efgsolve {

struct ConvergenceRecord {
  long long iteration = 0;
  long long traversals = 0;
  double eps_sad = 0;
  double mu1 = 0;  // zero for regret solvers
  double mu2 = 0;
  double wall_ms = 0;
};

// Power-of-two checkpoints by default (interval == 0) to keep log-log plots
// cheap; a positive interval records every `interval` iterations.
inline bool is_checkpoint(long long t, long long interval) {
  if (t <= 0) return false;
  if (interval > 0) return t % interval == 0;
  return (t & (t - 1)) == 0;
}

inline std::string telemetry_csv(const std::vector<ConvergenceRecord>& records,
                                 bool zero_wall = false) {
  std::string out = "iter,traversals,eps_sad,mu1,mu2,wall_ms\n";
  char buf[256];
  for (const ConvergenceRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g,%.17g,%.17g,%.3f\n", r.iteration,
                  r.traversals, r.eps_sad, r.mu1, r.mu2, zero_wall ? 0.0 : r.wall_ms);
    out += buf;
  }
  return out;
}

inline void write_telemetry_csv(const std::string& path,
                                const std::vector<ConvergenceRecord>& records,
                                bool zero_wall = false) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << telemetry_csv(records, zero_wall);
}

inline std::vector<ConvergenceRecord> parse_telemetry_csv(std::istream& in) {
  std::vector<ConvergenceRecord> out;
  std::string line;
  if (!std::getline(in, line) || line.rfind("iter,", 0) != 0) {
    throw std::invalid_argument("telemetry csv: missing header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ConvergenceRecord r;
    if (std::sscanf(line.c_str(), "%lld,%lld,%lg,%lg,%lg,%lg", &r.iteration, &r.traversals,
                    &r.eps_sad, &r.mu1, &r.mu2, &r.wall_ms) != 6) {
      throw std::invalid_argument("telemetry csv: bad row '" + line + "'");
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace efgsolve
