#pragma once

// Benchmark harness: builds a game from a declarative config, runs one
// solver to a target residual, and emits telemetry CSV. `compare` aligns
// several runs of the same game on the traversal axis for plotting.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "efgsolve/cfr.hpp"
#include "efgsolve/dgf.hpp"
#include "efgsolve/egt.hpp"
#include "efgsolve/game_tree.hpp"
#include "efgsolve/leduc.hpp"
#include "efgsolve/sequence_form.hpp"
#include "efgsolve/telemetry.hpp"

namespace efgsolve {

struct GameSpec {
  enum class Kind { kNone, kLeduc, kMatrixFile, kMatrixInline, kAlternating };
  Kind kind = Kind::kNone;
  int cards = 3;                              // leduc
  std::string file;                           // matrix file
  std::vector<std::vector<double>> payoffs;   // inline matrix
  int alt_k = 2, alt_d = 2;                   // alternating game

  bool operator==(const GameSpec& o) const {
    return kind == o.kind && cards == o.cards && file == o.file && payoffs == o.payoffs &&
           alt_k == o.alt_k && alt_d == o.alt_d;
  }
};

enum class SolverKind { kEgt, kCfr, kCfrPlus };

struct WeightSpec {
  WeightScheme scheme = WeightScheme::kPracticalNew;
  double c = 2.0;  // recurrence multiplier
};

// Accepts: recurrence:c, new, corollary, corollary-scaled, old.
inline WeightSpec parse_weight_scheme(const std::string& s) {
  WeightSpec w;
  if (s.rfind("recurrence", 0) == 0) {
    w.scheme = WeightScheme::kRecurrence;
    const auto colon = s.find(':');
    if (colon != std::string::npos) w.c = std::stod(s.substr(colon + 1));
    return w;
  }
  if (s == "new") w.scheme = WeightScheme::kPracticalNew;
  else if (s == "corollary") w.scheme = WeightScheme::kClosedForm;
  else if (s == "corollary-scaled") w.scheme = WeightScheme::kClosedFormScaled;
  else if (s == "old") w.scheme = WeightScheme::kPrior;
  else throw std::invalid_argument("unknown weight scheme '" + s + "'");
  return w;
}

struct RunConfig {
  GameSpec game;
  SolverKind solver = SolverKind::kEgt;
  WeightSpec weights;
  double mu_scale = 1.0;
  double dgf_scale = 1.0;
  double target_eps = 1e-6;
  long long max_iters = 10000;
  std::uint64_t seed = 1;
  std::string out;  // telemetry CSV path; empty = no file
  long long telemetry_interval = 0;
  bool zero_wall = false;  // write wall_ms as 0 for byte-reproducible CSVs
  std::string label = "run";
};

inline void validate_config(const RunConfig& c) {
  if (c.game.kind == GameSpec::Kind::kNone) throw std::invalid_argument("config: no game given");
  if (!(c.target_eps > 0)) throw std::invalid_argument("config: target_eps must be positive");
  if (c.max_iters < 0) throw std::invalid_argument("config: negative iteration budget");
}

inline GameTree build_game(const GameSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case GameSpec::Kind::kLeduc: {
      LeducConfig cfg;
      cfg.cards = spec.cards;
      return build_leduc(cfg);
    }
    case GameSpec::Kind::kMatrixFile: {
      std::ifstream in(spec.file);
      if (!in) throw std::runtime_error("cannot open matrix file " + spec.file);
      return build_matrix_game(read_dense_matrix(in));
    }
    case GameSpec::Kind::kMatrixInline:
      return build_matrix_game(spec.payoffs);
    case GameSpec::Kind::kAlternating:
      return build_alternating_game(spec.alt_k, spec.alt_d, seed);
    case GameSpec::Kind::kNone:
      break;
  }
  throw std::invalid_argument("config: no game given");
}

inline DgfWeights make_weights(const Treeplex& t, const TreeplexStats& stats,
                               const WeightSpec& spec) {
  switch (spec.scheme) {
    case WeightScheme::kRecurrence: return make_recurrence_weights(t, stats, spec.c);
    case WeightScheme::kPracticalNew: return make_practical_weights(t, stats);
    case WeightScheme::kClosedForm: return make_closed_form_weights(t, stats, false);
    case WeightScheme::kClosedFormScaled: return make_closed_form_weights(t, stats, true);
    case WeightScheme::kPrior: return make_prior_weights(t, stats);
  }
  throw std::logic_error("unreachable");
}

struct RunOutput {
  std::vector<ConvergenceRecord> records;
  double final_eps = 0;
  long long traversals = 0;
  bool reached_target = false;
  double wall_ms = 0;
  std::string label;
  GameSpec game;
};

inline RunOutput run(const RunConfig& cfg) {
  validate_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  const GameTree g = build_game(cfg.game, cfg.seed);
  const SequenceFormProblem p = to_sequence_form(g);
  RunOutput out;
  out.label = cfg.label;
  out.game = cfg.game;
  if (cfg.solver == SolverKind::kEgt) {
    DgfWeights wx = make_weights(p.X, p.x_stats, cfg.weights);
    DgfWeights wy = make_weights(p.Y, p.y_stats, cfg.weights);
    if (cfg.dgf_scale != 1.0) {
      scale_weights(wx, cfg.dgf_scale);
      scale_weights(wy, cfg.dgf_scale);
    }
    const DgfContext cx = make_dgf_context(p.X, p.x_stats, std::move(wx));
    const DgfContext cy = make_dgf_context(p.Y, p.y_stats, std::move(wy));
    EgtRunOptions opt;
    opt.mu_scale = cfg.mu_scale;
    opt.target_eps = cfg.target_eps;
    opt.max_iters = cfg.max_iters;
    opt.telemetry_interval = cfg.telemetry_interval;
    EgtResult r = egt_run(p, cx, cy, opt);
    out.records = std::move(r.records);
    out.final_eps = r.final_eps;
    out.traversals = r.state.traversals;
    out.reached_target = r.reached_target;
  } else {
    CfrOptions opt;
    opt.iterations = cfg.max_iters;
    opt.plus = cfg.solver == SolverKind::kCfrPlus;
    opt.telemetry_interval = cfg.telemetry_interval;
    CfrResult r = cfr_run(p, opt);
    out.records = std::move(r.records);
    out.final_eps = r.final_eps;
    out.traversals = r.traversals;
    out.reached_target = r.final_eps <= cfg.target_eps;
  }
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (!cfg.out.empty()) write_telemetry_csv(cfg.out, out.records, cfg.zero_wall);
  return out;
}

// Runs aligned on the traversal axis. Rows are the union of recorded
// traversal counts; each cell is the run's residual at the nearest
// checkpoint at or below the row's count (NaN before the first record).
struct CompareTable {
  std::vector<long long> traversals;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> eps;  // [run][row]
};

inline CompareTable align_runs(const std::vector<RunOutput>& runs) {
  CompareTable table;
  for (const RunOutput& r : runs) {
    for (const ConvergenceRecord& rec : r.records) table.traversals.push_back(rec.traversals);
  }
  std::sort(table.traversals.begin(), table.traversals.end());
  table.traversals.erase(std::unique(table.traversals.begin(), table.traversals.end()),
                         table.traversals.end());
  for (const RunOutput& r : runs) {
    table.labels.push_back(r.label);
    std::vector<double> col;
    col.reserve(table.traversals.size());
    size_t idx = 0;
    double last = std::numeric_limits<double>::quiet_NaN();
    for (long long q : table.traversals) {
      while (idx < r.records.size() && r.records[idx].traversals <= q) {
        last = r.records[idx].eps_sad;
        ++idx;
      }
      col.push_back(last);
    }
    table.eps.push_back(std::move(col));
  }
  return table;
}

inline CompareTable compare(const std::vector<RunConfig>& configs) {
  if (configs.empty()) throw std::invalid_argument("compare: no configs");
  for (size_t i = 1; i < configs.size(); ++i) {
    if (!(configs[i].game == configs[0].game)) {
      throw std::invalid_argument("compare: configs disagree on the game");
    }
  }
  std::vector<RunOutput> runs;
  runs.reserve(configs.size());
  for (const RunConfig& c : configs) runs.push_back(run(c));
  return align_runs(runs);
}

inline std::string compare_csv(const CompareTable& t) {
  std::string out = "traversals";
  for (const std::string& l : t.labels) out += "," + l;
  out += "\n";
  char buf[64];
  for (size_t row = 0; row < t.traversals.size(); ++row) {
    out += std::to_string(t.traversals[row]);
    for (size_t run = 0; run < t.eps.size(); ++run) {
      const double v = t.eps[run][row];
      if (std::isnan(v)) {
        out += ",";
      } else {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

inline void write_compare_csv(const std::string& path, const CompareTable& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << compare_csv(t);
}

// JSON config loading. Example:
//   {"game": {"kind": "leduc", "cards": 3}, "solver": "egt",
//    "weights": "new", "mu_scale": 0.05, "max_iters": 4096}
inline RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("game")) {
    const auto& g = j.at("game");
    const std::string kind = g.value("kind", "");
    if (kind == "leduc") {
      cfg.game.kind = GameSpec::Kind::kLeduc;
      cfg.game.cards = g.value("cards", 3);
    } else if (kind == "matrix") {
      cfg.game.kind = GameSpec::Kind::kMatrixFile;
      cfg.game.file = g.value("file", "");
    } else if (kind == "example1" || kind == "example-1") {
      cfg.game.kind = GameSpec::Kind::kAlternating;
      cfg.game.alt_k = g.value("k", 2);
      cfg.game.alt_d = g.value("d", 2);
    } else {
      throw std::invalid_argument("config json: unknown game kind '" + kind + "'");
    }
  }
  const std::string solver = j.value("solver", "egt");
  if (solver == "egt") cfg.solver = SolverKind::kEgt;
  else if (solver == "cfr") cfg.solver = SolverKind::kCfr;
  else if (solver == "cfrplus") cfg.solver = SolverKind::kCfrPlus;
  else throw std::invalid_argument("config json: unknown solver '" + solver + "'");
  if (j.contains("weights")) cfg.weights = parse_weight_scheme(j.at("weights").get<std::string>());
  cfg.mu_scale = j.value("mu_scale", cfg.mu_scale);
  cfg.dgf_scale = j.value("dgf_scale", cfg.dgf_scale);
  cfg.target_eps = j.value("target_eps", cfg.target_eps);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out = j.value("out", cfg.out);
  cfg.telemetry_interval = j.value("telemetry_interval", cfg.telemetry_interval);
  cfg.zero_wall = j.value("zero_wall", cfg.zero_wall);
  cfg.label = j.value("label", cfg.label);
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  nlohmann::json j;
  in >> j;
  return run_config_from_json(j);
}

}  // namespace efgsolve
