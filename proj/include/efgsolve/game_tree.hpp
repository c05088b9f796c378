#pragma once

// Extensive-form game trees: chance nodes, decision nodes grouped into
// per-player information sets, and terminals carrying the payoff to player 2.
// Player 1 is the minimizer (the x side), player 2 the maximizer (the y
// side); this orientation is fixed once here and everywhere downstream.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace efgsolve {

enum class NodeKind { kChance, kDecision, kTerminal };

struct GameNode {
  NodeKind kind = NodeKind::kTerminal;
  int player = 0;    // 1 or 2 for decision nodes
  int infoset = -1;  // per-player infoset id for decision nodes
  std::vector<int> children;
  std::vector<double> chance_probs;  // chance nodes only, aligned with children
  double payoff_to_p2 = 0;           // terminal nodes only
};

struct InfoSet {
  int id = 0;
  int player = 0;
  std::string key;  // observable history; identical for all member nodes
  std::vector<std::string> actions;
  std::vector<int> nodes;
};

struct GameTree {
  std::vector<GameNode> nodes;
  int root = 0;
  std::array<std::vector<InfoSet>, 2> infosets;  // [player-1]

  int add_node(GameNode n) {
    nodes.push_back(std::move(n));
    return static_cast<int>(nodes.size()) - 1;
  }

  // Finds or creates the infoset for (player, key); actions must match on
  // reuse.
  int infoset_id(int player, const std::string& key, const std::vector<std::string>& actions) {
    auto& table = infosets[player - 1];
    if (auto it = lookup_[player - 1].find(key); it != lookup_[player - 1].end()) {
      return it->second;
    }
    InfoSet is;
    is.id = static_cast<int>(table.size());
    is.player = player;
    is.key = key;
    is.actions = actions;
    table.push_back(std::move(is));
    lookup_[player - 1].emplace(key, table.back().id);
    return table.back().id;
  }

  void register_decision(int node_id) {
    GameNode& n = nodes[node_id];
    infosets[n.player - 1][n.infoset].nodes.push_back(node_id);
  }

 private:
  std::array<std::map<std::string, int>, 2> lookup_;
};

// Chance outcome probabilities must form distributions.
inline void validate_game(const GameTree& g, double tol = 1e-12) {
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const GameNode& n = g.nodes[i];
    if (n.kind == NodeKind::kChance) {
      double sum = 0;
      for (double p : n.chance_probs) {
        if (p < 0) throw std::invalid_argument("negative chance probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol) {
        throw std::invalid_argument("chance node " + std::to_string(i) +
                                    " probabilities sum to " + std::to_string(sum));
      }
      if (n.chance_probs.size() != n.children.size()) {
        throw std::invalid_argument("chance node outcome/child mismatch");
      }
    } else if (n.kind == NodeKind::kDecision) {
      if (n.player != 1 && n.player != 2) throw std::invalid_argument("bad player id");
      const InfoSet& is = g.infosets[n.player - 1][n.infoset];
      if (is.actions.size() != n.children.size()) {
        throw std::invalid_argument("decision node action/child mismatch");
      }
    }
  }
}

// One simplex per player: player 1 picks the row, player 2 the column, and
// neither observes the other's move. payoffs[i][j] is the payoff to player 2.
inline GameTree build_matrix_game(const std::vector<std::vector<double>>& payoffs) {
  if (payoffs.empty() || payoffs[0].empty()) throw std::invalid_argument("empty payoff matrix");
  const int m = static_cast<int>(payoffs.size());
  const int n = static_cast<int>(payoffs[0].size());
  for (const auto& row : payoffs) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("ragged payoff matrix");
  }
  GameTree g;
  auto label_list = [](int k, const char* prefix) {
    std::vector<std::string> out;
    for (int i = 0; i < k; ++i) out.push_back(prefix + std::to_string(i));
    return out;
  };
  const int row_is = g.infoset_id(1, "row", label_list(m, "r"));
  const int col_is = g.infoset_id(2, "col", label_list(n, "c"));
  GameNode root;
  root.kind = NodeKind::kDecision;
  root.player = 1;
  root.infoset = row_is;
  const int root_id = g.add_node(std::move(root));
  g.register_decision(root_id);
  for (int i = 0; i < m; ++i) {
    GameNode mid;
    mid.kind = NodeKind::kDecision;
    mid.player = 2;
    mid.infoset = col_is;
    const int mid_id = g.add_node(std::move(mid));
    g.register_decision(mid_id);
    g.nodes[root_id].children.push_back(mid_id);
    for (int j = 0; j < n; ++j) {
      GameNode leaf;
      leaf.kind = NodeKind::kTerminal;
      leaf.payoff_to_p2 = payoffs[i][j];
      const int leaf_id = g.add_node(std::move(leaf));
      g.nodes[mid_id].children.push_back(leaf_id);
    }
  }
  g.root = root_id;
  validate_game(g);
  return g;
}

namespace detail {
inline double unit_from_hash(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  x ^= x >> 31;
  return static_cast<double>(x >> 11) * 0x1p-53;
}
}  // namespace detail

// Perfect-information game where the players alternate picking one of k
// actions, d times each, starting with player 1. Leaf payoffs are seeded
// pseudo-random in [-1, 1]. Player 1's strategy space interleaves a size-k
// choice with a k-way product of continuations at every level.
inline GameTree build_alternating_game(int k, int d, std::uint64_t seed = 1) {
  if (k < 2 || d < 1) throw std::invalid_argument("alternating game needs k >= 2, d >= 1");
  GameTree g;
  std::vector<std::string> labels;
  for (int a = 0; a < k; ++a) labels.push_back("a" + std::to_string(a));
  std::uint64_t leaf_counter = 0;
  // plies alternate 1,2,1,2,... for 2d plies total
  std::function<int(int, std::string&)> rec = [&](int ply, std::string& hist) -> int {
    if (ply == 2 * d) {
      GameNode leaf;
      leaf.kind = NodeKind::kTerminal;
      leaf.payoff_to_p2 = 2.0 * detail::unit_from_hash(seed * 0x100000001b3ull + leaf_counter++) - 1.0;
      return g.add_node(std::move(leaf));
    }
    const int player = (ply % 2 == 0) ? 1 : 2;
    GameNode node;
    node.kind = NodeKind::kDecision;
    node.player = player;
    node.infoset = g.infoset_id(player, "h=" + hist, labels);
    const int id = g.add_node(std::move(node));
    g.register_decision(id);
    for (int a = 0; a < k; ++a) {
      hist.push_back(static_cast<char>('0' + a));
      const int child = rec(ply + 1, hist);  // may reallocate g.nodes
      g.nodes[id].children.push_back(child);
      hist.pop_back();
    }
    return id;
  };
  std::string hist;
  g.root = rec(0, hist);
  validate_game(g);
  return g;
}

// Plain text serialization. Line formats:
//   efg <num_nodes> <root>
//   c <id> <k> (<child> <prob>)*
//   d <id> <player> <infoset_key> <k> (<child> <label>)*
//   t <id> <payoff_to_p2>
// Keys and labels must not contain whitespace. Probabilities and payoffs
// round-trip through %.17g.
inline void write_game_text(const GameTree& g, std::ostream& os) {
  os << "efg " << g.nodes.size() << ' ' << g.root << '\n';
  char buf[64];
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const GameNode& n = g.nodes[i];
    switch (n.kind) {
      case NodeKind::kChance: {
        os << "c " << i << ' ' << n.children.size();
        for (size_t c = 0; c < n.children.size(); ++c) {
          std::snprintf(buf, sizeof buf, "%.17g", n.chance_probs[c]);
          os << ' ' << n.children[c] << ' ' << buf;
        }
        os << '\n';
        break;
      }
      case NodeKind::kDecision: {
        const InfoSet& is = g.infosets[n.player - 1][n.infoset];
        os << "d " << i << ' ' << n.player << ' ' << is.key << ' ' << n.children.size();
        for (size_t c = 0; c < n.children.size(); ++c) {
          os << ' ' << n.children[c] << ' ' << is.actions[c];
        }
        os << '\n';
        break;
      }
      case NodeKind::kTerminal: {
        std::snprintf(buf, sizeof buf, "%.17g", n.payoff_to_p2);
        os << "t " << i << ' ' << buf << '\n';
        break;
      }
    }
  }
}

inline GameTree read_game_text(std::istream& in) {
  std::string tag;
  size_t count = 0;
  int root = 0;
  if (!(in >> tag >> count >> root) || tag != "efg") {
    throw std::invalid_argument("game text: bad header");
  }
  GameTree g;
  g.nodes.resize(count);
  g.root = root;
  for (size_t line = 0; line < count; ++line) {
    std::string kind;
    size_t id;
    if (!(in >> kind >> id) || id >= count) throw std::invalid_argument("game text: bad node line");
    GameNode& n = g.nodes[id];
    if (kind == "c") {
      n.kind = NodeKind::kChance;
      size_t k;
      in >> k;
      n.children.resize(k);
      n.chance_probs.resize(k);
      for (size_t c = 0; c < k; ++c) in >> n.children[c] >> n.chance_probs[c];
    } else if (kind == "d") {
      n.kind = NodeKind::kDecision;
      std::string key;
      size_t k;
      in >> n.player >> key >> k;
      n.children.resize(k);
      std::vector<std::string> labels(k);
      for (size_t c = 0; c < k; ++c) in >> n.children[c] >> labels[c];
      n.infoset = g.infoset_id(n.player, key, labels);
      g.register_decision(static_cast<int>(id));
    } else if (kind == "t") {
      n.kind = NodeKind::kTerminal;
      in >> n.payoff_to_p2;
    } else {
      throw std::invalid_argument("game text: unknown node kind '" + kind + "'");
    }
    if (!in) throw std::invalid_argument("game text: truncated node line");
  }
  validate_game(g);
  return g;
}

// Whitespace-separated dense matrix, one row per line; '#' starts a comment.
inline std::vector<std::vector<double>> read_dense_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("matrix file: no rows");
  for (const auto& r : rows) {
    if (r.size() != rows[0].size()) throw std::invalid_argument("matrix file: ragged rows");
  }
  return rows;
}

}  // namespace efgsolve
