// efgsolve: build a zero-sum extensive-form game, run a solver to a target
// saddle-point residual, and emit convergence telemetry as CSV.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "efgsolve/efgsolve.hpp"

namespace {

struct GameFlags {
  std::string game;
  int cards = 3;
  std::string file;
  int k = 2;
  int d = 2;
};

void add_game_flags(CLI::App* cmd, GameFlags* f) {
  cmd->add_option("--game", f->game, "Game: leduc | matrix | example1");
  cmd->add_option("--cards", f->cards, "Leduc rank count k (deck size 2k)");
  cmd->add_option("--file", f->file, "Dense payoff matrix file for --game matrix");
  cmd->add_option("--k", f->k, "Actions per move for --game example1");
  cmd->add_option("--d", f->d, "Moves per player for --game example1");
}

efgsolve::GameSpec game_from_flags(const GameFlags& f) {
  efgsolve::GameSpec spec;
  if (f.game == "leduc") {
    spec.kind = efgsolve::GameSpec::Kind::kLeduc;
    spec.cards = f.cards;
  } else if (f.game == "matrix") {
    spec.kind = efgsolve::GameSpec::Kind::kMatrixFile;
    spec.file = f.file;
    if (f.file.empty()) throw CLI::ValidationError("--game matrix requires --file");
  } else if (f.game == "example1" || f.game == "example-1") {
    spec.kind = efgsolve::GameSpec::Kind::kAlternating;
    spec.alt_k = f.k;
    spec.alt_d = f.d;
  } else if (f.game.empty()) {
    throw CLI::ValidationError("--game is required (leduc | matrix | example1)");
  } else {
    throw CLI::ValidationError("unknown game '" + f.game + "'");
  }
  return spec;
}

efgsolve::SolverKind solver_from_string(const std::string& s) {
  if (s == "egt") return efgsolve::SolverKind::kEgt;
  if (s == "cfr") return efgsolve::SolverKind::kCfr;
  if (s == "cfrplus") return efgsolve::SolverKind::kCfrPlus;
  throw CLI::ValidationError("unknown solver '" + s + "'");
}

// Per-run spec for `compare`: comma-separated key=value pairs, e.g.
//   solver=egt,weights=new,mu-scale=0.05,label=egt-new
efgsolve::RunConfig parse_run_spec(efgsolve::RunConfig base, const std::string& spec) {
  size_t start = 0;
  while (start < spec.size()) {
    size_t comma = spec.find(',', start);
    if (comma == std::string::npos) comma = spec.size();
    const std::string item = spec.substr(start, comma - start);
    start = comma + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--run expects key=value pairs");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    if (key == "solver") base.solver = solver_from_string(val);
    else if (key == "weights") base.weights = efgsolve::parse_weight_scheme(val);
    else if (key == "mu-scale") base.mu_scale = std::stod(val);
    else if (key == "dgf-scale") base.dgf_scale = std::stod(val);
    else if (key == "label") base.label = val;
    else throw CLI::ValidationError("unknown --run key '" + key + "'");
  }
  return base;
}

int do_run(const efgsolve::RunConfig& cfg, const std::string& dump_weights,
           const std::string& export_matrix, const std::string& export_game) {
  if (!dump_weights.empty() || !export_matrix.empty() || !export_game.empty()) {
    const efgsolve::GameTree g = efgsolve::build_game(cfg.game, cfg.seed);
    const efgsolve::SequenceFormProblem p = efgsolve::to_sequence_form(g);
    if (!export_matrix.empty()) efgsolve::export_matrix_csv(p, export_matrix);
    if (!export_game.empty()) {
      std::ofstream out(export_game);
      efgsolve::write_game_text(g, out);
    }
    if (!dump_weights.empty()) {
      efgsolve::DgfWeights w = efgsolve::make_weights(p.X, p.x_stats, cfg.weights);
      efgsolve::write_weights_csv(dump_weights, w);
    }
  }
  const efgsolve::RunOutput out = efgsolve::run(cfg);
  std::printf("final eps_sad=%.6g traversals=%lld wall_ms=%.1f%s\n", out.final_eps,
              out.traversals, out.wall_ms, out.reached_target ? "" : " (budget exhausted)");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-sum extensive-form game solver (smoothed first-order and regret methods)"};
  app.require_subcommand(1);

  // run
  GameFlags run_game;
  std::string config_path, solver = "egt", weights = "new";
  std::string dump_weights, export_matrix, export_game;
  efgsolve::RunConfig cfg;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one solver and write telemetry");
  add_game_flags(run_cmd, &run_game);
  run_cmd->add_option("--config", config_path, "JSON config; flags override its fields");
  run_cmd->add_option("--solver", solver, "egt | cfr | cfrplus");
  run_cmd->add_option("--weights", weights,
                      "recurrence:c | new | corollary | corollary-scaled | old");
  run_cmd->add_option("--mu-scale", cfg.mu_scale, "Initial smoothing multiplier");
  run_cmd->add_option("--dgf-scale", cfg.dgf_scale, "Multiplier on all simplex weights");
  run_cmd->add_option("--target-eps", cfg.target_eps, "Stop when eps_sad reaches this");
  run_cmd->add_option("--max-iters", cfg.max_iters, "Iteration budget");
  run_cmd->add_option("--seed", cfg.seed, "Seed for generated payoffs");
  run_cmd->add_option("--out", cfg.out, "Telemetry CSV path");
  run_cmd->add_option("--interval", cfg.telemetry_interval,
                      "Checkpoint every n iterations (0: powers of two)");
  run_cmd->add_flag("--no-timing", cfg.zero_wall, "Write wall_ms as 0 (byte-reproducible CSV)");
  run_cmd->add_option("--label", cfg.label, "Run label");
  run_cmd->add_option("--dump-weights", dump_weights, "Write player-1 weight CSV and continue");
  run_cmd->add_option("--export-matrix", export_matrix, "Write payoff matrix CSV and continue");
  run_cmd->add_option("--export-game", export_game, "Write game tree text and continue");

  // compare
  GameFlags cmp_game;
  std::vector<std::string> run_specs;
  efgsolve::RunConfig cmp_base;
  std::string cmp_out = "compare.csv";
  CLI::App* cmp_cmd = app.add_subcommand("compare", "Run several solvers on one game and merge");
  add_game_flags(cmp_cmd, &cmp_game);
  cmp_cmd->add_option("--run", run_specs, "Per-run spec: solver=...,weights=...,label=...")
      ->required();
  cmp_cmd->add_option("--target-eps", cmp_base.target_eps, "Stop threshold for every run");
  cmp_cmd->add_option("--max-iters", cmp_base.max_iters, "Iteration budget for every run");
  cmp_cmd->add_option("--interval", cmp_base.telemetry_interval, "Checkpoint interval");
  cmp_cmd->add_option("--seed", cmp_base.seed, "Seed for generated payoffs");
  cmp_cmd->add_option("--out", cmp_out, "Merged CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      if (!config_path.empty()) {
        efgsolve::RunConfig file_cfg = efgsolve::load_run_config(config_path);
        // CLI flags override JSON values.
        if (run_cmd->count("--solver")) file_cfg.solver = solver_from_string(solver);
        if (run_cmd->count("--weights")) file_cfg.weights = efgsolve::parse_weight_scheme(weights);
        if (run_cmd->count("--mu-scale")) file_cfg.mu_scale = cfg.mu_scale;
        if (run_cmd->count("--dgf-scale")) file_cfg.dgf_scale = cfg.dgf_scale;
        if (run_cmd->count("--target-eps")) file_cfg.target_eps = cfg.target_eps;
        if (run_cmd->count("--max-iters")) file_cfg.max_iters = cfg.max_iters;
        if (run_cmd->count("--seed")) file_cfg.seed = cfg.seed;
        if (run_cmd->count("--out")) file_cfg.out = cfg.out;
        if (run_cmd->count("--interval")) file_cfg.telemetry_interval = cfg.telemetry_interval;
        if (run_cmd->count("--no-timing")) file_cfg.zero_wall = cfg.zero_wall;
        if (run_cmd->count("--label")) file_cfg.label = cfg.label;
        if (run_cmd->count("--game")) file_cfg.game = game_from_flags(run_game);
        return do_run(file_cfg, dump_weights, export_matrix, export_game);
      }
      cfg.game = game_from_flags(run_game);
      cfg.solver = solver_from_string(solver);
      cfg.weights = efgsolve::parse_weight_scheme(weights);
      return do_run(cfg, dump_weights, export_matrix, export_game);
    }
    if (cmp_cmd->parsed()) {
      cmp_base.game = game_from_flags(cmp_game);
      std::vector<efgsolve::RunConfig> configs;
      for (const std::string& spec : run_specs) {
        configs.push_back(parse_run_spec(cmp_base, spec));
      }
      const efgsolve::CompareTable table = efgsolve::compare(configs);
      efgsolve::write_compare_csv(cmp_out, table);
      std::printf("wrote %s (%zu rows, %zu runs)\n", cmp_out.c_str(), table.traversals.size(),
                  table.labels.size());
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
