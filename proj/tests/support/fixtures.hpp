#pragma once

// Shared test instances and deterministic random generators. The rng is a
// hand-rolled splitmix64 so values are identical across platforms and
// standard library versions.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "efgsolve/treeplex.hpp"

namespace efgsolve::testing {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed = 1) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

// The nine-simplex example: two root simplexes (2 and 3 variables), five
// leaf pairs, and one variable that branches into a product of two
// simplexes. Variables 0..19, simplex ids 0..8.
inline Treeplex figure1_treeplex() {
  TreeplexBuilder b;
  const int d1 = b.add_simplex(kRootParent, 2);  // vars 0,1
  const int d2 = b.add_simplex(kRootParent, 3);  // vars 2,3,4
  b.add_simplex(b.first_variable(d1) + 0, 2);    // d3, vars 5,6, under var 0
  b.add_simplex(b.first_variable(d1) + 1, 2);    // d4, vars 7,8, under var 1
  b.add_simplex(b.first_variable(d2) + 0, 2);    // d5, vars 9,10
  b.add_simplex(b.first_variable(d2) + 1, 2);    // d6, vars 11,12
  b.add_simplex(b.first_variable(d2) + 2, 2);    // d7, vars 13,14
  b.add_simplex(6, 3);                           // d8, vars 15,16,17, under var 6
  b.add_simplex(6, 2);                           // d9, vars 18,19, under var 6
  return b.build();
}

inline Treeplex single_simplex(int m) {
  TreeplexBuilder b;
  b.add_simplex(kRootParent, m);
  return b.build();
}

// Two-level chain: a 2-simplex whose first variable carries another
// 2-simplex.
inline Treeplex chain_treeplex() {
  TreeplexBuilder b;
  const int root = b.add_simplex(kRootParent, 2);
  b.add_simplex(b.first_variable(root), 2);
  return b.build();
}

// Random treeplex with bounded depth and variable count. Roots and simplex
// sizes are random; each variable sprouts children while budget remains.
inline Treeplex random_treeplex(Rng& rng, int max_depth = 3, int max_vars = 40) {
  TreeplexBuilder b;
  int vars_used = 0;
  struct Slot {
    int parent_variable;
    int depth;
  };
  std::vector<Slot> queue;
  const int num_roots = rng.uniform_int(1, 2);
  for (int r = 0; r < num_roots; ++r) queue.push_back({kRootParent, 0});
  size_t head = 0;
  while (head < queue.size()) {
    const Slot slot = queue[head++];
    const int want = rng.uniform_int(2, 4);
    const int size = std::min(want, max_vars - vars_used);
    if (size < 1) break;
    const int id = b.add_simplex(slot.parent_variable, size);
    vars_used += size;
    if (slot.depth >= max_depth) continue;
    for (int pos = 0; pos < size; ++pos) {
      if (vars_used >= max_vars - 2) break;
      const double roll = rng.uniform();
      int kids = 0;
      if (roll < 0.25) kids = 1;
      else if (roll < 0.35) kids = 2;
      for (int c = 0; c < kids; ++c) queue.push_back({b.first_variable(id) + pos, slot.depth + 1});
    }
  }
  return b.build();
}

// Tiny treeplexes (<= max_vars variables) for brute-force prox comparisons.
inline Treeplex random_tiny_treeplex(Rng& rng, int max_vars = 8) {
  while (true) {
    Treeplex t = random_treeplex(rng, 2, max_vars);
    if (t.num_variables <= max_vars) return t;
  }
}

// Strictly interior point: random per-simplex distributions with an entry
// floor, pushed down the tree.
inline std::vector<double> random_interior_point(const Treeplex& t, Rng& rng,
                                                 double floor = 0.1) {
  std::vector<double> b(t.num_variables, 0.0);
  for (const SimplexNode& node : t.simplexes) {
    double sum = 0;
    for (int v : node.variables) {
      b[v] = floor + rng.uniform();
      sum += b[v];
    }
    for (int v : node.variables) b[v] /= sum;
  }
  return sequence_from_behavioral(t, b);
}

inline std::vector<double> random_direction(int n, Rng& rng) {
  std::vector<double> h(n);
  for (double& v : h) v = rng.uniform(-1.0, 1.0);
  return h;
}

inline double linf_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double norm1(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += std::abs(x);
  return s;
}

inline double norm2_squared(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace efgsolve::testing
