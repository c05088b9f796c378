#pragma once

// Treeplexes: trees of simplexes composed by Cartesian products and
// branching. Each simplex holds a block of "sequence" variables; the block
// sums to the value of a parent variable one level up (or to 1 at a root).
// For a perfect-recall player this is exactly the sequence-form strategy
// polytope: simplexes are information sets, variables are (infoset, action)
// realization weights.
//
// Ids are dense and topological: parents always precede children, so an
// ascending pass over simplexes is top-down and a descending pass is
// bottom-up. This invariant is relied on throughout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace efgsolve {

inline constexpr int kRootParent = -1;

struct SimplexNode {
  int id = 0;
  std::vector<int> variables;              // ordered global variable indices
  int parent_variable = kRootParent;       // sequence this simplex hangs off
  std::vector<std::vector<int>> children;  // children[pos]: simplex ids below variables[pos]
  int depth_below = 0;                     // branching levels beneath; leaf = 0
  int branchings_above = 0;                // branching operations above; root = 0

  int dim() const { return static_cast<int>(variables.size()); }
};

struct ValidationResult {
  bool ok = true;
  std::string message;
  explicit operator bool() const { return ok; }
};

struct Treeplex {
  std::vector<SimplexNode> simplexes;
  int num_variables = 0;
  std::vector<int> root_simplexes;  // ids with branchings_above == 0
  std::vector<int> variable_owner;  // variable -> owning simplex id

  int size() const { return static_cast<int>(simplexes.size()); }
};

// Fills derived fields (variable_owner, root_simplexes, depth_below,
// branchings_above) from the primary data (variables, parent links, child
// lists). Tolerant of malformed input; validate() reports the problems.
inline void annotate(Treeplex& t) {
  const int n = t.size();
  t.variable_owner.assign(std::max(t.num_variables, 0), -1);
  for (int j = 0; j < n; ++j) {
    for (int v : t.simplexes[j].variables) {
      if (v >= 0 && v < t.num_variables && t.variable_owner[v] == -1) {
        t.variable_owner[v] = j;
      }
    }
  }
  t.root_simplexes.clear();
  for (int j = 0; j < n; ++j) {
    SimplexNode& node = t.simplexes[j];
    node.id = j;
    if (node.children.size() != node.variables.size()) {
      node.children.resize(node.variables.size());
    }
    if (node.parent_variable == kRootParent) {
      node.branchings_above = 0;
      t.root_simplexes.push_back(j);
    } else if (node.parent_variable >= 0 && node.parent_variable < t.num_variables) {
      const int parent_simplex = t.variable_owner[node.parent_variable];
      node.branchings_above =
          (parent_simplex >= 0 && parent_simplex < j)
              ? t.simplexes[parent_simplex].branchings_above + 1
              : 0;
    } else {
      node.branchings_above = 0;
    }
  }
  for (int j = n - 1; j >= 0; --j) {
    SimplexNode& node = t.simplexes[j];
    int depth = 0;
    for (const auto& kids : node.children) {
      for (int k : kids) {
        if (k > j && k < n) depth = std::max(depth, 1 + t.simplexes[k].depth_below);
      }
    }
    node.depth_below = depth;
  }
}

// Structural validation: dense topological ids, variable partition, forest
// child maps, and consistency of the depth/branching annotations.
inline ValidationResult validate(const Treeplex& t) {
  const int n = t.size();
  auto fail = [](const std::string& msg) { return ValidationResult{false, msg}; };

  for (int j = 0; j < n; ++j) {
    if (t.simplexes[j].id != j) return fail("simplex ids are not dense and ordered");
    if (t.simplexes[j].variables.empty()) return fail("simplex " + std::to_string(j) + " has no variables");
  }

  std::vector<int> owner(t.num_variables, -1);
  for (int j = 0; j < n; ++j) {
    for (int v : t.simplexes[j].variables) {
      if (v < 0 || v >= t.num_variables) {
        return fail("variable index " + std::to_string(v) + " out of range");
      }
      if (owner[v] != -1) {
        return fail("duplicate variable index " + std::to_string(v) +
                    " (simplexes " + std::to_string(owner[v]) + " and " + std::to_string(j) + ")");
      }
      owner[v] = j;
    }
  }
  for (int v = 0; v < t.num_variables; ++v) {
    if (owner[v] == -1) return fail("variable index " + std::to_string(v) + " not housed by any simplex");
  }

  std::vector<int> parent_refs(n, 0);
  for (int j = 0; j < n; ++j) {
    const SimplexNode& node = t.simplexes[j];
    if (node.children.size() != node.variables.size()) {
      return fail("simplex " + std::to_string(j) + ": child map not aligned with variables");
    }
    for (size_t pos = 0; pos < node.variables.size(); ++pos) {
      for (int k : node.children[pos]) {
        if (k < 0 || k >= n) return fail("child simplex id " + std::to_string(k) + " out of range");
        if (k <= j) {
          return fail("cyclic child map: simplex " + std::to_string(k) +
                      " does not follow its parent " + std::to_string(j));
        }
        if (t.simplexes[k].parent_variable != node.variables[pos]) {
          return fail("child simplex " + std::to_string(k) + " disagrees with parent link");
        }
        if (++parent_refs[k] > 1) {
          return fail("simplex " + std::to_string(k) + " has two parents (forest violated)");
        }
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    const SimplexNode& node = t.simplexes[j];
    if (node.parent_variable == kRootParent) {
      if (parent_refs[j] != 0) {
        return fail("simplex " + std::to_string(j) + " marked root but appears as a child");
      }
      if (node.branchings_above != 0) {
        return fail("root simplex " + std::to_string(j) + " has nonzero branchings_above");
      }
    } else {
      if (node.parent_variable < 0 || node.parent_variable >= t.num_variables) {
        return fail("orphan simplex " + std::to_string(j) + ": parent variable out of range");
      }
      if (parent_refs[j] != 1) {
        return fail("orphan simplex " + std::to_string(j) + ": missing from its parent's child map");
      }
      const int ps = owner[node.parent_variable];
      if (ps >= j) return fail("cyclic child map: parent of simplex " + std::to_string(j) + " does not precede it");
      if (node.branchings_above != t.simplexes[ps].branchings_above + 1) {
        return fail("branchings_above inconsistent at simplex " + std::to_string(j));
      }
    }
    int depth = 0;
    bool leaf = true;
    for (const auto& kids : node.children) {
      for (int k : kids) {
        leaf = false;
        depth = std::max(depth, 1 + t.simplexes[k].depth_below);
      }
    }
    if (leaf && node.depth_below != 0) {
      return fail("leaf simplex " + std::to_string(j) + " has nonzero depth_below");
    }
    if (!leaf && node.depth_below != depth) {
      return fail("depth_below inconsistent at simplex " + std::to_string(j));
    }
  }
  if (!t.variable_owner.empty() && t.variable_owner != owner) {
    return fail("variable_owner cache stale");
  }
  return {};
}

// Incremental construction helper. Simplexes must be added parents-first;
// dense variable ids are assigned in insertion order.
class TreeplexBuilder {
 public:
  // Returns the id of the new simplex. `parent_variable` must be a variable
  // created by an earlier add_simplex call, or kRootParent.
  int add_simplex(int parent_variable, int num_vars) {
    if (num_vars <= 0) throw std::invalid_argument("simplex needs at least one variable");
    if (parent_variable != kRootParent &&
        (parent_variable < 0 || parent_variable >= t_.num_variables)) {
      throw std::invalid_argument("parent variable does not exist yet");
    }
    SimplexNode node;
    node.id = t_.size();
    node.parent_variable = parent_variable;
    node.variables.resize(num_vars);
    node.children.resize(num_vars);
    for (int i = 0; i < num_vars; ++i) node.variables[i] = t_.num_variables + i;
    t_.num_variables += num_vars;
    t_.simplexes.push_back(std::move(node));
    return t_.simplexes.back().id;
  }

  int first_variable(int simplex) const { return t_.simplexes[simplex].variables.front(); }

  Treeplex build() {
    // Derive child lists from parent links.
    std::vector<int> owner(t_.num_variables, -1);
    for (int j = 0; j < t_.size(); ++j) {
      for (size_t pos = 0; pos < t_.simplexes[j].variables.size(); ++pos) {
        owner[t_.simplexes[j].variables[pos]] = j;
        t_.simplexes[j].children[pos].clear();
      }
    }
    for (int j = 0; j < t_.size(); ++j) {
      const int p = t_.simplexes[j].parent_variable;
      if (p == kRootParent) continue;
      SimplexNode& parent = t_.simplexes[owner[p]];
      for (size_t pos = 0; pos < parent.variables.size(); ++pos) {
        if (parent.variables[pos] == p) parent.children[pos].push_back(j);
      }
    }
    annotate(t_);
    if (auto r = validate(t_); !r.ok) throw std::logic_error("treeplex builder: " + r.message);
    return std::move(t_);
  }

 private:
  Treeplex t_;
};

// Size statistics. M values are maxima of the l1 norm over the polytope
// (integer-valued counts); the _r variants truncate the norm to simplexes
// within r branching operations of the subtree root.
struct TreeplexStats {
  long long M_Q = 0;
  std::vector<long long> M_Q_r;  // r = 0..d_Q
  int d_Q = 0;
  int m_max = 0;                                       // largest simplex dimension
  std::vector<long long> per_subtree_M;                // per simplex j
  std::vector<std::vector<long long>> per_subtree_M_r; // [j][r], r = 0..d_j
};

inline TreeplexStats compute_stats(const Treeplex& t) {
  const int n = t.size();
  TreeplexStats s;
  s.per_subtree_M.assign(n, 0);
  s.per_subtree_M_r.assign(n, {});
  // Bottom-up: M over a subtree puts weight 1 on one variable of the root
  // simplex and recurses into all simplexes below that variable.
  for (int j = n - 1; j >= 0; --j) {
    const SimplexNode& node = t.simplexes[j];
    s.m_max = std::max(s.m_max, node.dim());
    const int dj = node.depth_below;
    std::vector<long long> mr(dj + 1, 1);
    for (int r = 1; r <= dj; ++r) {
      long long best = 0;
      for (const auto& kids : node.children) {
        long long sum = 0;
        for (int k : kids) {
          const auto& child_mr = s.per_subtree_M_r[k];
          sum += child_mr[std::min<size_t>(r - 1, child_mr.size() - 1)];
        }
        best = std::max(best, sum);
      }
      mr[r] = 1 + best;
    }
    s.per_subtree_M[j] = mr[dj];
    s.per_subtree_M_r[j] = std::move(mr);
  }
  for (int j : t.root_simplexes) {
    s.M_Q += s.per_subtree_M[j];
    s.d_Q = std::max(s.d_Q, t.simplexes[j].depth_below);
  }
  s.M_Q_r.assign(s.d_Q + 1, 0);
  for (int r = 0; r <= s.d_Q; ++r) {
    for (int j : t.root_simplexes) {
      const auto& mr = s.per_subtree_M_r[j];
      s.M_Q_r[r] += mr[std::min<size_t>(r, mr.size() - 1)];
    }
  }
  return s;
}

// Number of 0/1 vertices (pure strategies); saturates well above any
// reasonable enumeration limit.
inline double count_vertices(const Treeplex& t) {
  const int n = t.size();
  std::vector<double> cnt(n, 0.0);
  for (int j = n - 1; j >= 0; --j) {
    const SimplexNode& node = t.simplexes[j];
    double total = 0;
    for (const auto& kids : node.children) {
      double prod = 1;
      for (int k : kids) prod *= cnt[k];
      total += prod;
    }
    cnt[j] = std::min(total, 1e18);
  }
  double total = 1;
  for (int j : t.root_simplexes) total = std::min(total * cnt[j], 1e18);
  return total;
}

namespace detail {
template <typename F>
void vertex_rec(const Treeplex& t, std::vector<int>& pending, size_t idx,
                std::vector<double>& cur, F& emit) {
  if (idx == pending.size()) {
    emit(const_cast<const std::vector<double>&>(cur));
    return;
  }
  const SimplexNode& node = t.simplexes[pending[idx]];
  for (size_t pos = 0; pos < node.variables.size(); ++pos) {
    const int v = node.variables[pos];
    cur[v] = 1.0;
    const size_t mark = pending.size();
    for (int k : node.children[pos]) pending.push_back(k);
    vertex_rec(t, pending, idx + 1, cur, emit);
    pending.resize(mark);
    cur[v] = 0.0;
  }
}
}  // namespace detail

// Streams every vertex exactly once. Refuses up front when the vertex count
// exceeds `limit` (the enumeration is exponential in general).
template <typename F>
void for_each_vertex(const Treeplex& t, F&& emit, std::int64_t limit = 1'000'000) {
  const double count = count_vertices(t);
  if (count > static_cast<double>(limit)) {
    throw std::runtime_error("vertex enumeration refused: " + std::to_string(count) +
                             " vertices exceed limit " + std::to_string(limit));
  }
  std::vector<double> cur(t.num_variables, 0.0);
  std::vector<int> pending(t.root_simplexes);
  detail::vertex_rec(t, pending, 0, cur, emit);
}

inline std::vector<std::vector<double>> enumerate_vertices(const Treeplex& t,
                                                           std::int64_t limit = 1'000'000) {
  std::vector<std::vector<double>> out;
  for_each_vertex(t, [&](const std::vector<double>& v) { out.push_back(v); }, limit);
  return out;
}

// Per-simplex local distributions q_i / q_{p_j}. Simplexes whose parent
// sequence has zero weight get the uniform distribution.
inline std::vector<double> behavioral_from_sequence(const Treeplex& t,
                                                    const std::vector<double>& q,
                                                    double tol = 1e-9) {
  if (static_cast<int>(q.size()) != t.num_variables) {
    throw std::invalid_argument("behavioral_from_sequence: dimension mismatch");
  }
  for (double qi : q) {
    if (qi < -tol) throw std::invalid_argument("behavioral_from_sequence: negative entry");
  }
  std::vector<double> b(q.size(), 0.0);
  for (const SimplexNode& node : t.simplexes) {
    const double qp = node.parent_variable == kRootParent ? 1.0 : q[node.parent_variable];
    double sum = 0;
    for (int v : node.variables) sum += q[v];
    if (std::abs(sum - qp) > tol * std::max(1.0, std::abs(qp))) {
      throw std::invalid_argument("behavioral_from_sequence: simplex " + std::to_string(node.id) +
                                  " sums to " + std::to_string(sum) + " but parent weight is " +
                                  std::to_string(qp));
    }
    if (qp < 1e-300) {
      const double u = 1.0 / node.dim();
      for (int v : node.variables) b[v] = u;
    } else {
      for (int v : node.variables) b[v] = std::max(q[v], 0.0) / qp;
    }
  }
  return b;
}

inline std::vector<double> sequence_from_behavioral(const Treeplex& t,
                                                    const std::vector<double>& b) {
  std::vector<double> q(t.num_variables, 0.0);
  for (const SimplexNode& node : t.simplexes) {
    const double mass = node.parent_variable == kRootParent ? 1.0 : q[node.parent_variable];
    for (int v : node.variables) q[v] = b[v] * mass;
  }
  return q;
}

inline std::vector<double> uniform_sequence(const Treeplex& t) {
  std::vector<double> b(t.num_variables, 0.0);
  for (const SimplexNode& node : t.simplexes) {
    for (int v : node.variables) b[v] = 1.0 / node.dim();
  }
  return sequence_from_behavioral(t, b);
}

// Max violation of the per-simplex sum constraints.
inline double feasibility_error(const Treeplex& t, const std::vector<double>& q) {
  double err = 0;
  for (const SimplexNode& node : t.simplexes) {
    const double qp = node.parent_variable == kRootParent ? 1.0 : q[node.parent_variable];
    double sum = 0;
    for (int v : node.variables) sum += q[v];
    err = std::max(err, std::abs(sum - qp));
  }
  for (double qi : q) err = std::max(err, -qi);
  return err;
}

// Text form, one line per simplex: `j | p_j | v:k1,k2 v: ... ;`
// Indices are decimal and round-trip exactly.
inline std::string to_text(const Treeplex& t) {
  std::ostringstream os;
  for (const SimplexNode& node : t.simplexes) {
    os << node.id << " | " << node.parent_variable << " |";
    for (size_t pos = 0; pos < node.variables.size(); ++pos) {
      os << ' ' << node.variables[pos] << ':';
      const auto& kids = node.children[pos];
      for (size_t c = 0; c < kids.size(); ++c) {
        if (c) os << ',';
        os << kids[c];
      }
    }
    os << " ;\n";
  }
  return os.str();
}

inline Treeplex treeplex_from_text(const std::string& text) {
  Treeplex t;
  std::istringstream in(text);
  std::string line;
  int max_var = -1;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    SimplexNode node;
    std::string tok;
    char bar;
    if (!(ls >> node.id >> bar) || bar != '|') throw std::invalid_argument("treeplex text: bad id field");
    if (!(ls >> node.parent_variable >> bar) || bar != '|') {
      throw std::invalid_argument("treeplex text: bad parent field");
    }
    while (ls >> tok) {
      if (tok == ";") break;
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("treeplex text: expected v:children");
      node.variables.push_back(std::stoi(tok.substr(0, colon)));
      max_var = std::max(max_var, node.variables.back());
      std::vector<int> kids;
      std::string rest = tok.substr(colon + 1);
      size_t start = 0;
      while (start < rest.size()) {
        size_t comma = rest.find(',', start);
        if (comma == std::string::npos) comma = rest.size();
        kids.push_back(std::stoi(rest.substr(start, comma - start)));
        start = comma + 1;
      }
      node.children.push_back(std::move(kids));
    }
    t.simplexes.push_back(std::move(node));
  }
  t.num_variables = max_var + 1;
  annotate(t);
  if (auto r = validate(t); !r.ok) throw std::invalid_argument("treeplex text: " + r.message);
  return t;
}

}  // namespace efgsolve
