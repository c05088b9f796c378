#pragma once

// Leduc-style hold'em on a deck of k rank pairs (2k cards). Both players
// ante one chip and receive a private card; a betting round follows, then a
// community card, then a second betting round. At showdown a player pairing
// the community card wins; otherwise the higher private card wins and equal
// ranks split the pot. Cards of one rank are indistinguishable, so
// information sets are keyed by rank.
//
// Betting is fixed-limit: at most `max_bets_per_round` bets (bet + raises)
// per round, with the round's bet size added per bet. Player 1 opens both
// rounds. Actions: k = check, b = bet/raise, c = call, f = fold.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "efgsolve/game_tree.hpp"

namespace efgsolve {

struct LeducConfig {
  int cards = 3;                         // k ranks, deck size 2k
  std::vector<double> bet_sizes = {2, 4};  // per round
  int max_bets_per_round = 2;
  double ante = 1;
};

inline void validate_config(const LeducConfig& cfg) {
  if (cfg.cards < 2) throw std::invalid_argument("leduc: need at least 2 ranks");
  if (cfg.bet_sizes.size() != 2) throw std::invalid_argument("leduc: two betting rounds");
  for (double b : cfg.bet_sizes) {
    if (!(b > 0)) throw std::invalid_argument("leduc: bet sizes must be positive");
  }
  if (cfg.max_bets_per_round < 0) throw std::invalid_argument("leduc: negative bet cap");
  if (!(cfg.ante > 0)) throw std::invalid_argument("leduc: ante must be positive");
}

namespace detail {

struct LeducBuilder {
  const LeducConfig& cfg;
  GameTree& g;
  int deck;  // 2k

  int rank(int card) const { return card / 2; }

  std::string infoset_key(int player, int private_rank, int board_rank,
                          const std::string& hist) const {
    return "p" + std::to_string(player) + "|r" + std::to_string(private_rank) + "|b" +
           (board_rank < 0 ? std::string("-") : std::to_string(board_rank)) + "|" + hist;
  }

  int terminal(double payoff_to_p2) {
    GameNode leaf;
    leaf.kind = NodeKind::kTerminal;
    leaf.payoff_to_p2 = payoff_to_p2;
    return g.add_node(std::move(leaf));
  }

  int showdown(int c1, int c2, int board, double contrib) {
    const int r1 = rank(c1), r2 = rank(c2), rb = rank(board);
    int winner = 0;  // 0 = split
    if (r1 == rb) winner = 1;
    else if (r2 == rb) winner = 2;
    else if (r1 > r2) winner = 1;
    else if (r2 > r1) winner = 2;
    const double payoff = winner == 0 ? 0.0 : (winner == 2 ? contrib : -contrib);
    return terminal(payoff);
  }

  // One betting round. `hist` accumulates all public actions (rounds joined
  // by '/'); contrib is per-player chips committed so far.
  int betting(int c1, int c2, int board, int round, std::string hist, int to_act, int bets_used,
              double outstanding, double contrib1, double contrib2) {
    const int private_rank = to_act == 1 ? rank(c1) : rank(c2);
    const int board_rank = board < 0 ? -1 : rank(board);
    const double bet = cfg.bet_sizes[round];

    std::vector<std::string> actions;
    if (outstanding == 0) {
      actions.push_back("k");
      if (bets_used < cfg.max_bets_per_round) actions.push_back("b");
    } else {
      actions.push_back("f");
      actions.push_back("c");
      if (bets_used < cfg.max_bets_per_round) actions.push_back("r");
    }

    GameNode node;
    node.kind = NodeKind::kDecision;
    node.player = to_act;
    node.infoset = g.infoset_id(to_act, infoset_key(to_act, private_rank, board_rank, hist), actions);
    const int id = g.add_node(std::move(node));
    g.register_decision(id);

    const int opp = 3 - to_act;
    for (const std::string& a : actions) {
      const std::string h = hist + a;
      int child = -1;
      if (a == "f") {
        // Folder forfeits their contribution.
        child = terminal(to_act == 1 ? contrib1 : -contrib2);
      } else if (a == "c") {
        const double nc1 = to_act == 1 ? contrib1 + outstanding : contrib1;
        const double nc2 = to_act == 2 ? contrib2 + outstanding : contrib2;
        child = round_over(c1, c2, board, round, h, nc1, nc2);
      } else if (a == "k") {
        const bool closes = !hist.empty() && hist.back() == 'k';
        child = closes ? round_over(c1, c2, board, round, h, contrib1, contrib2)
                       : betting(c1, c2, board, round, h, opp, bets_used, 0, contrib1, contrib2);
      } else {  // bet or raise: match any outstanding amount and add one bet
        const double add = outstanding + bet;
        const double nc1 = to_act == 1 ? contrib1 + add : contrib1;
        const double nc2 = to_act == 2 ? contrib2 + add : contrib2;
        child = betting(c1, c2, board, round, h, opp, bets_used + 1, bet, nc1, nc2);
      }
      g.nodes[id].children.push_back(child);
    }
    return id;
  }

  int round_over(int c1, int c2, int board, int round, const std::string& hist, double contrib1,
                 double contrib2) {
    if (round == 1) return showdown(c1, c2, board, contrib1);
    // Deal the community card from the remaining deck.
    GameNode chance;
    chance.kind = NodeKind::kChance;
    const int id = g.add_node(std::move(chance));
    const double p = 1.0 / (deck - 2);
    for (int card = 0; card < deck; ++card) {
      if (card == c1 || card == c2) continue;
      // Recursion may reallocate g.nodes; fetch the child id first.
      const int child = betting(c1, c2, card, 1, hist + "/", 1, 0, 0, contrib1, contrib2);
      g.nodes[id].children.push_back(child);
      g.nodes[id].chance_probs.push_back(p);
    }
    return id;
  }
};

}  // namespace detail

inline GameTree build_leduc(const LeducConfig& cfg) {
  validate_config(cfg);
  GameTree g;
  const int deck = 2 * cfg.cards;
  detail::LeducBuilder b{cfg, g, deck};
  GameNode root;
  root.kind = NodeKind::kChance;
  const int root_id = g.add_node(std::move(root));
  const double p = 1.0 / (deck * (deck - 1));
  for (int c1 = 0; c1 < deck; ++c1) {
    for (int c2 = 0; c2 < deck; ++c2) {
      if (c1 == c2) continue;
      const int child = b.betting(c1, c2, -1, 0, "", 1, 0, 0, cfg.ante, cfg.ante);
      g.nodes[root_id].children.push_back(child);
      g.nodes[root_id].chance_probs.push_back(p);
    }
  }
  g.root = root_id;
  validate_game(g);
  return g;
}

}  // namespace efgsolve
