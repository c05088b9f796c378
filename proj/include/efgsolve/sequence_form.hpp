#pragma once

// Sequence-form extraction. Player 1's and player 2's strategy spaces become
// treeplexes X and Y (one simplex per information set, one variable per
// (infoset, action) sequence), and the payoff becomes the bilinear form
//
//   phi(x, y) = v0 + <a1, x> + <a2, y> + x^T A y
//
// where A[row, col] accumulates chance_prob * payoff over the leaves reached
// under (row = player-1 sequence, col = player-2 sequence). A holds payoffs
// to the maximizer (player 2); player 1 minimizes. Leaves at which a player
// never acted land in a1/a2/v0, which are identically zero for games where
// both players act on every path. The sequence-form constraint matrices are
// never materialized: they are exactly the treeplex sum constraints.

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "efgsolve/game_tree.hpp"
#include "efgsolve/sparse_matrix.hpp"
#include "efgsolve/treeplex.hpp"

namespace efgsolve {

struct SequenceFormProblem {
  Treeplex X, Y;
  TreeplexStats x_stats, y_stats;
  SparseMatrix A;
  std::vector<double> a1, a2;
  double v0 = 0;
  double a_norm = 0;  // max_{i,j} |A_ij|, the matrix norm for the l1/linf pairing
};

namespace detail {

struct SeqFormExtractor {
  const GameTree& g;
  // Per player: simplex id assigned to each infoset (-1 until first visit)
  // and the parent sequence recorded at that first visit.
  std::array<std::vector<int>, 2> simplex_of_infoset;
  std::array<std::vector<int>, 2> parent_seq_of_infoset;
  std::array<TreeplexBuilder, 2> builders;
  std::array<std::vector<int>, 2> first_variable;  // per infoset
  std::vector<std::tuple<int, int, double>> triples;  // (x_seq+1, y_seq+1) space

  explicit SeqFormExtractor(const GameTree& game) : g(game) {
    for (int p = 0; p < 2; ++p) {
      simplex_of_infoset[p].assign(g.infosets[p].size(), -1);
      parent_seq_of_infoset[p].assign(g.infosets[p].size(), -2);
      first_variable[p].assign(g.infosets[p].size(), -1);
    }
  }

  // seq1/seq2: current sequence variable of each player, -1 for the empty
  // sequence.
  void walk(int node_id, int seq1, int seq2, double prob) {
    const GameNode& n = g.nodes[node_id];
    switch (n.kind) {
      case NodeKind::kTerminal:
        triples.emplace_back(seq1 + 1, seq2 + 1, prob * n.payoff_to_p2);
        return;
      case NodeKind::kChance:
        for (size_t c = 0; c < n.children.size(); ++c) {
          walk(n.children[c], seq1, seq2, prob * n.chance_probs[c]);
        }
        return;
      case NodeKind::kDecision:
        break;
    }
    const int p = n.player - 1;
    const int own_seq = n.player == 1 ? seq1 : seq2;
    int simplex = simplex_of_infoset[p][n.infoset];
    if (simplex == -1) {
      simplex = builders[p].add_simplex(own_seq == -1 ? kRootParent : own_seq,
                                        static_cast<int>(n.children.size()));
      simplex_of_infoset[p][n.infoset] = simplex;
      parent_seq_of_infoset[p][n.infoset] = own_seq;
      first_variable[p][n.infoset] = builders[p].first_variable(simplex);
    } else if (parent_seq_of_infoset[p][n.infoset] != own_seq) {
      throw std::invalid_argument(
          "perfect recall violated at information set '" + g.infosets[p][n.infoset].key +
          "': reached with different own histories");
    }
    const int base = first_variable[p][n.infoset];
    for (size_t c = 0; c < n.children.size(); ++c) {
      const int v = base + static_cast<int>(c);
      walk(n.children[c], n.player == 1 ? v : seq1, n.player == 2 ? v : seq2, prob);
    }
  }
};

}  // namespace detail

inline SequenceFormProblem to_sequence_form(const GameTree& g) {
  validate_game(g);
  detail::SeqFormExtractor ex(g);
  ex.walk(g.root, -1, -1, 1.0);
  SequenceFormProblem p;
  p.X = ex.builders[0].build();
  p.Y = ex.builders[1].build();
  p.x_stats = compute_stats(p.X);
  p.y_stats = compute_stats(p.Y);
  p.a1.assign(p.X.num_variables, 0.0);
  p.a2.assign(p.Y.num_variables, 0.0);
  std::vector<std::tuple<int, int, double>> bilinear;
  bilinear.reserve(ex.triples.size());
  for (const auto& [r, c, v] : ex.triples) {
    if (r == 0 && c == 0) {
      p.v0 += v;
    } else if (c == 0) {
      p.a1[r - 1] += v;
    } else if (r == 0) {
      p.a2[c - 1] += v;
    } else {
      bilinear.emplace_back(r - 1, c - 1, v);
    }
  }
  p.A = SparseMatrix::from_triples(p.X.num_variables, p.Y.num_variables, std::move(bilinear));
  p.a_norm = p.A.max_abs();
  return p;
}

// Degenerate strategy spaces (a player who never acts) are representable in
// principle but none of the built-in games produce them.

struct BestResponse {
  double value = 0;  // the full phi-bar(x) or phi-underbar(y)
  std::vector<double> vertex;
};

namespace detail {

// Bottom-up linear optimization over a treeplex: each variable's value is
// its gradient entry plus the optimal values of the simplexes below it; each
// simplex picks the best variable (first index wins ties).
inline BestResponse treeplex_linear_opt(const Treeplex& t, const std::vector<double>& g,
                                        bool maximize) {
  const int n = t.size();
  std::vector<double> val(n, 0.0);
  std::vector<int> best(n, -1);
  for (int j = n - 1; j >= 0; --j) {
    const SimplexNode& node = t.simplexes[j];
    double best_v = 0;
    int best_pos = -1;
    for (size_t pos = 0; pos < node.variables.size(); ++pos) {
      double av = g[node.variables[pos]];
      for (int k : node.children[pos]) av += val[k];
      if (best_pos == -1 || (maximize ? av > best_v : av < best_v)) {
        best_v = av;
        best_pos = static_cast<int>(pos);
      }
    }
    val[j] = best_v;
    best[j] = best_pos;
  }
  BestResponse out;
  out.vertex.assign(t.num_variables, 0.0);
  std::vector<char> active(n, 0);
  for (int j : t.root_simplexes) {
    active[j] = 1;
    out.value += val[j];
  }
  for (int j = 0; j < n; ++j) {
    if (!active[j]) continue;
    const SimplexNode& node = t.simplexes[j];
    out.vertex[node.variables[best[j]]] = 1.0;
    for (int k : node.children[best[j]]) active[k] = 1;
  }
  return out;
}

}  // namespace detail

// Exact best response for `responder` against the opponent's sequence-form
// strategy. responder == 2 returns max_y phi(x, y); responder == 1 returns
// min_x phi(x, y).
inline BestResponse best_response_value(const SequenceFormProblem& p, int responder,
                                        const std::vector<double>& opponent_strategy) {
  if (responder == 2) {
    if (static_cast<int>(opponent_strategy.size()) != p.X.num_variables) {
      throw std::invalid_argument("best_response_value: expected a player-1 strategy");
    }
    std::vector<double> g(p.Y.num_variables);
    p.A.multiply_transpose(opponent_strategy, g);
    for (int i = 0; i < p.Y.num_variables; ++i) g[i] += p.a2[i];
    BestResponse br = detail::treeplex_linear_opt(p.Y, g, /*maximize=*/true);
    double lin = p.v0;
    for (int i = 0; i < p.X.num_variables; ++i) lin += p.a1[i] * opponent_strategy[i];
    br.value += lin;
    return br;
  }
  if (responder == 1) {
    if (static_cast<int>(opponent_strategy.size()) != p.Y.num_variables) {
      throw std::invalid_argument("best_response_value: expected a player-2 strategy");
    }
    std::vector<double> g(p.X.num_variables);
    p.A.multiply(opponent_strategy, g);
    for (int i = 0; i < p.X.num_variables; ++i) g[i] += p.a1[i];
    BestResponse br = detail::treeplex_linear_opt(p.X, g, /*maximize=*/false);
    double lin = p.v0;
    for (int i = 0; i < p.Y.num_variables; ++i) lin += p.a2[i] * opponent_strategy[i];
    br.value += lin;
    return br;
  }
  throw std::invalid_argument("responder must be 1 or 2");
}

// Saddle point residual phi-bar(x) - phi-underbar(y); nonnegative for
// feasible pairs and zero exactly at equilibrium. Small negative float noise
// is clamped; anything beyond noise level indicates a bug upstream.
inline double saddle_residual(const SequenceFormProblem& p, const std::vector<double>& x,
                              const std::vector<double>& y) {
  const double hi = best_response_value(p, 2, x).value;
  const double lo = best_response_value(p, 1, y).value;
  const double raw = hi - lo;
  const double scale = std::max({1.0, std::abs(hi), std::abs(lo)});
  if (raw < -1e-9 * scale) {
    throw std::runtime_error("saddle_residual came out negative: " + std::to_string(raw));
  }
  return std::max(raw, 0.0);
}

inline double phi_value(const SequenceFormProblem& p, const std::vector<double>& x,
                        const std::vector<double>& y) {
  std::vector<double> ay(p.X.num_variables);
  p.A.multiply(y, ay);
  double v = p.v0;
  for (int i = 0; i < p.X.num_variables; ++i) v += (p.a1[i] + ay[i]) * x[i];
  for (int i = 0; i < p.Y.num_variables; ++i) v += p.a2[i] * y[i];
  return v;
}

// Debug export of the bilinear block in coordinate form.
inline void export_matrix_csv(const SequenceFormProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "row,col,value\n";
  char buf[96];
  for (int r = 0; r < p.A.rows; ++r) {
    for (int k = p.A.row_ptr[r]; k < p.A.row_ptr[r + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", r, p.A.col_idx[k], p.A.csr_values[k]);
      out << buf;
    }
  }
}

}  // namespace efgsolve
