#pragma once

// Counterfactual regret minimization baselines over the sequence form.
// One gradient (A*y or A^T*x) plus one treeplex sweep is exactly one tree
// pass, so both variants cost two traversals per iteration.
//
// Vanilla: simultaneous updates from the iteration-start strategies, regret
// matching (play proportional to positive regret, uniform when none), and
// uniform averaging of the sequence-form iterates.
//
// Plus variant: alternating updates (player 1 first), accumulated values
// clipped at zero after every update, and linear averaging (iterate t gets
// weight t). These conventions follow the standard baseline definitions.

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "efgsolve/sequence_form.hpp"
#include "efgsolve/telemetry.hpp"

namespace efgsolve {

struct RegretTable {
  std::vector<double> regret;        // per sequence variable
  std::vector<double> strategy_sum;  // accumulated weighted sequence-form mass
  double weight_sum = 0;
};

namespace detail {

// Behavioral strategy by regret matching, then its sequence form.
inline void regret_matching_sequence(const Treeplex& t, const std::vector<double>& regret,
                                     std::vector<double>& behavioral, std::vector<double>& seq) {
  behavioral.assign(t.num_variables, 0.0);
  seq.assign(t.num_variables, 0.0);
  for (const SimplexNode& node : t.simplexes) {
    double pos = 0;
    for (int v : node.variables) pos += std::max(regret[v], 0.0);
    if (pos > 0) {
      for (int v : node.variables) behavioral[v] = std::max(regret[v], 0.0) / pos;
    } else {
      const double u = 1.0 / node.dim();
      for (int v : node.variables) behavioral[v] = u;
    }
  }
  for (const SimplexNode& node : t.simplexes) {
    const double mass = node.parent_variable == kRootParent ? 1.0 : seq[node.parent_variable];
    for (int v : node.variables) seq[v] = behavioral[v] * mass;
  }
}

// One regret-update sweep. `util` is the player's counterfactual utility
// gradient (chance and opponent reach already folded in); the action value
// adds the optimal-play values of the simplexes below, the simplex value
// mixes with the current behavioral, and the difference increments regret.
inline void accumulate_regrets(const Treeplex& t, const std::vector<double>& util,
                               const std::vector<double>& behavioral, bool clip_at_zero,
                               std::vector<double>& regret) {
  const int n = t.size();
  std::vector<double> val(n, 0.0);
  std::vector<double> action_value(t.num_variables, 0.0);
  for (int j = n - 1; j >= 0; --j) {
    const SimplexNode& node = t.simplexes[j];
    double v = 0;
    for (size_t pos = 0; pos < node.variables.size(); ++pos) {
      const int var = node.variables[pos];
      double av = util[var];
      for (int k : node.children[pos]) av += val[k];
      action_value[var] = av;
      v += behavioral[var] * av;
    }
    val[j] = v;
    for (int var : node.variables) {
      const double next = regret[var] + action_value[var] - v;
      regret[var] = clip_at_zero ? std::max(next, 0.0) : next;
    }
  }
}

}  // namespace detail

struct CfrOptions {
  long long iterations = 1000;
  bool plus = false;
  long long telemetry_interval = 0;
  // Invoked after every iteration with both regret tables (test hook).
  std::function<void(long long, const RegretTable&, const RegretTable&)> on_iteration;
};

struct CfrResult {
  std::vector<double> avg_x, avg_y;
  std::vector<ConvergenceRecord> records;
  RegretTable table_x, table_y;
  long long traversals = 0;
  double final_eps = 0;
};

inline CfrResult cfr_run(const SequenceFormProblem& p, const CfrOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  CfrResult out;
  RegretTable& rx = out.table_x;
  RegretTable& ry = out.table_y;
  rx.regret.assign(p.X.num_variables, 0.0);
  rx.strategy_sum.assign(p.X.num_variables, 0.0);
  ry.regret.assign(p.Y.num_variables, 0.0);
  ry.strategy_sum.assign(p.Y.num_variables, 0.0);

  std::vector<double> bx, by, x_cur, y_cur, util;
  detail::regret_matching_sequence(p.X, rx.regret, bx, x_cur);
  detail::regret_matching_sequence(p.Y, ry.regret, by, y_cur);

  auto p1_utility = [&](const std::vector<double>& y) {
    std::vector<double> u(p.X.num_variables);
    p.A.multiply(y, u);
    for (int i = 0; i < p.X.num_variables; ++i) u[i] = -(u[i] + p.a1[i]);
    return u;
  };
  auto p2_utility = [&](const std::vector<double>& x) {
    std::vector<double> u(p.Y.num_variables);
    p.A.multiply_transpose(x, u);
    for (int i = 0; i < p.Y.num_variables; ++i) u[i] += p.a2[i];
    return u;
  };

  auto averages = [&](std::vector<double>& ax, std::vector<double>& ay) {
    ax = rx.strategy_sum;
    ay = ry.strategy_sum;
    if (rx.weight_sum > 0) {
      for (double& v : ax) v /= rx.weight_sum;
      for (double& v : ay) v /= ry.weight_sum;
    } else {
      ax = uniform_sequence(p.X);
      ay = uniform_sequence(p.Y);
    }
  };

  for (long long t = 1; t <= opt.iterations; ++t) {
    if (!opt.plus) {
      util = p1_utility(y_cur);  // traversal
      detail::accumulate_regrets(p.X, util, bx, false, rx.regret);
      util = p2_utility(x_cur);  // traversal
      detail::accumulate_regrets(p.Y, util, by, false, ry.regret);
      out.traversals += 2;
      for (int i = 0; i < p.X.num_variables; ++i) rx.strategy_sum[i] += x_cur[i];
      for (int i = 0; i < p.Y.num_variables; ++i) ry.strategy_sum[i] += y_cur[i];
      rx.weight_sum += 1;
      ry.weight_sum += 1;
      detail::regret_matching_sequence(p.X, rx.regret, bx, x_cur);
      detail::regret_matching_sequence(p.Y, ry.regret, by, y_cur);
    } else {
      util = p1_utility(y_cur);  // traversal
      detail::accumulate_regrets(p.X, util, bx, true, rx.regret);
      detail::regret_matching_sequence(p.X, rx.regret, bx, x_cur);
      util = p2_utility(x_cur);  // traversal
      detail::accumulate_regrets(p.Y, util, by, true, ry.regret);
      detail::regret_matching_sequence(p.Y, ry.regret, by, y_cur);
      out.traversals += 2;
      const double w = static_cast<double>(t);
      for (int i = 0; i < p.X.num_variables; ++i) rx.strategy_sum[i] += w * x_cur[i];
      for (int i = 0; i < p.Y.num_variables; ++i) ry.strategy_sum[i] += w * y_cur[i];
      rx.weight_sum += w;
      ry.weight_sum += w;
    }
    if (opt.on_iteration) opt.on_iteration(t, rx, ry);
    if (is_checkpoint(t, opt.telemetry_interval) || t == opt.iterations) {
      std::vector<double> ax, ay;
      averages(ax, ay);
      const double eps = saddle_residual(p, ax, ay);
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      out.records.push_back({t, out.traversals, eps, 0.0, 0.0, ms});
      out.final_eps = eps;
    }
  }
  averages(out.avg_x, out.avg_y);
  return out;
}

}  // namespace efgsolve
