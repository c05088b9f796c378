#pragma once

// Dilated entropy distance-generating functions over treeplexes.
//
//   omega(q) = sum_j beta_j * sum_{i in I_j} q_i * log(q_i / q_{p_j})
//
// with q_{p_j} = 1 at root simplexes and 0*log(0/.) = 0. Everything here is
// driven by the per-simplex weights beta_j; the schemes below differ only in
// how those weights are derived from the treeplex structure.
//
//   recurrence:c   alpha_j = 1 + max_i sum_{k in D_j^i} alpha_k*beta_k/(beta_k-alpha_k),
//                  beta_j = c*alpha_j below roots, beta_j = alpha_j at roots (c > 1).
//                  Certified strongly convex: modulus 1 in l2, 1/M_Q in l1.
//   new            alpha_j = 1 + max_i sum_k 2*alpha_k and beta_j = alpha_j
//                  everywhere. The c->1 limit of the child aggregation is
//                  singular, so the child term is fixed at its c=2 value.
//                  Heuristic: no certificate attached.
//   corollary      beta_j = 2 + sum_{r=1..d_j} 2^r (M_{Q_j,r} - 1); modulus
//                  1/M_Q in l1. "corollary-scaled" multiplies by M_Q, giving
//                  modulus 1 and set width at most M_Q^2 * 2^{d_Q+2} * log m.
//   old            beta_j = 2^{d_j} * M_{Q_j}; modulus 1/|S_Q| in l1.
//
// The prox mapping and smoothed argmax are closed-form: one bottom-up
// log-sum-exp sweep plus one top-down product sweep.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "efgsolve/treeplex.hpp"

namespace efgsolve {

enum class WeightScheme { kRecurrence, kPracticalNew, kClosedForm, kClosedFormScaled, kPrior };

inline const char* scheme_name(WeightScheme s) {
  switch (s) {
    case WeightScheme::kRecurrence: return "recurrence";
    case WeightScheme::kPracticalNew: return "new";
    case WeightScheme::kClosedForm: return "corollary";
    case WeightScheme::kClosedFormScaled: return "corollary-scaled";
    case WeightScheme::kPrior: return "old";
  }
  return "?";
}

struct DgfWeights {
  WeightScheme scheme = WeightScheme::kRecurrence;
  double recurrence_multiplier = 2.0;  // the c in beta_j = c*alpha_j
  std::vector<double> alpha;
  std::vector<double> beta;
  double ell1_modulus = 1.0;  // strong convexity modulus w.r.t. l1
  bool certified = true;      // false for heuristic schemes
  double scale = 1.0;         // user multiplier already applied to beta
};

inline DgfWeights make_recurrence_weights(const Treeplex& t, const TreeplexStats& stats,
                                          double c) {
  if (!(c > 1.0)) {
    throw std::invalid_argument("recurrence weights need c > 1 (beta - alpha must stay positive)");
  }
  const int n = t.size();
  DgfWeights w;
  w.scheme = WeightScheme::kRecurrence;
  w.recurrence_multiplier = c;
  w.alpha.assign(n, 0.0);
  w.beta.assign(n, 0.0);
  for (int j = n - 1; j >= 0; --j) {
    const SimplexNode& node = t.simplexes[j];
    double worst = 0;
    for (const auto& kids : node.children) {
      double sum = 0;
      for (int k : kids) sum += w.alpha[k] * w.beta[k] / (w.beta[k] - w.alpha[k]);
      worst = std::max(worst, sum);
    }
    w.alpha[j] = 1.0 + worst;
    w.beta[j] = node.branchings_above == 0 ? w.alpha[j] : c * w.alpha[j];
  }
  w.ell1_modulus = 1.0 / static_cast<double>(stats.M_Q);
  w.certified = true;
  return w;
}

// The experimentally preferred choice beta_j = alpha_j for all j. The strict
// inequality behind the certificates is violated, so this is flagged as
// heuristic; the nominal modulus below is used only to seed step sizes.
inline DgfWeights make_practical_weights(const Treeplex& t, const TreeplexStats& stats) {
  const int n = t.size();
  DgfWeights w;
  w.scheme = WeightScheme::kPracticalNew;
  w.alpha.assign(n, 0.0);
  w.beta.assign(n, 0.0);
  for (int j = n - 1; j >= 0; --j) {
    const SimplexNode& node = t.simplexes[j];
    double worst = 0;
    for (const auto& kids : node.children) {
      double sum = 0;
      for (int k : kids) sum += 2.0 * w.alpha[k];
      worst = std::max(worst, sum);
    }
    w.alpha[j] = 1.0 + worst;
    w.beta[j] = w.alpha[j];
  }
  w.ell1_modulus = 1.0 / static_cast<double>(stats.M_Q);
  w.certified = false;
  return w;
}

inline DgfWeights make_closed_form_weights(const Treeplex& t, const TreeplexStats& stats,
                                           bool scale_by_mq) {
  const int n = t.size();
  DgfWeights w;
  w.scheme = scale_by_mq ? WeightScheme::kClosedFormScaled : WeightScheme::kClosedForm;
  w.alpha.assign(n, 0.0);
  w.beta.assign(n, 0.0);
  const double mq = static_cast<double>(stats.M_Q);
  for (int j = 0; j < n; ++j) {
    const int dj = t.simplexes[j].depth_below;
    double b = 2.0;
    double pow2 = 2.0;
    for (int r = 1; r <= dj; ++r) {
      b += pow2 * static_cast<double>(stats.per_subtree_M_r[j][r] - 1);
      pow2 *= 2.0;
    }
    if (scale_by_mq) b *= mq;
    w.beta[j] = b;
    w.alpha[j] = b / 2.0;
  }
  w.ell1_modulus = scale_by_mq ? 1.0 : 1.0 / mq;
  w.certified = true;
  return w;
}

inline DgfWeights make_prior_weights(const Treeplex& t, const TreeplexStats& stats) {
  const int n = t.size();
  DgfWeights w;
  w.scheme = WeightScheme::kPrior;
  w.alpha.assign(n, 0.0);
  w.beta.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    w.beta[j] = std::ldexp(static_cast<double>(stats.per_subtree_M[j]),
                           t.simplexes[j].depth_below);
    w.alpha[j] = w.beta[j];
  }
  w.ell1_modulus = 1.0 / static_cast<double>(t.size());
  w.certified = true;
  return w;
}

// User-visible tuning multiplier on all beta. Strong convexity scales with
// it, so the recorded modulus follows.
inline void scale_weights(DgfWeights& w, double s) {
  if (!(s > 0)) throw std::invalid_argument("weight scale must be positive");
  for (double& b : w.beta) b *= s;
  for (double& a : w.alpha) a *= s;
  w.ell1_modulus *= s;
  w.scale *= s;
}

// Numerical consistency report: recompute alpha bottom-up from the given
// beta and flag simplexes where the defining inequalities fail. Used to
// audit the closed-form schemes rather than to assert them.
inline std::vector<int> recurrence_violations(const Treeplex& t, const DgfWeights& w,
                                              double tol = 1e-9) {
  const int n = t.size();
  std::vector<double> alpha(n, 0.0);
  std::vector<int> bad;
  for (int j = n - 1; j >= 0; --j) {
    const SimplexNode& node = t.simplexes[j];
    double worst = 0;
    bool defined = true;
    for (const auto& kids : node.children) {
      double sum = 0;
      for (int k : kids) {
        if (w.beta[k] <= alpha[k]) {
          defined = false;
          break;
        }
        sum += alpha[k] * w.beta[k] / (w.beta[k] - alpha[k]);
      }
      if (!defined) break;
      worst = std::max(worst, sum);
    }
    alpha[j] = defined ? 1.0 + worst : std::numeric_limits<double>::infinity();
    const bool root = node.branchings_above == 0;
    const bool ok = defined && (root ? std::abs(w.beta[j] - alpha[j]) <= tol * alpha[j]
                                     : w.beta[j] > alpha[j]);
    if (!ok) bad.push_back(j);
  }
  std::sort(bad.begin(), bad.end());
  return bad;
}

// Check of the auxiliary inequality beta_j >= 2 + sum_{k in D_j^i} 2*beta_k
// for every (j, i). Known to fail on some structures; callers log the
// violations instead of asserting.
inline std::vector<int> child_doubling_violations(const Treeplex& t, const DgfWeights& w,
                                                  double tol = 1e-9) {
  std::vector<int> bad;
  for (const SimplexNode& node : t.simplexes) {
    for (const auto& kids : node.children) {
      double rhs = 2.0;
      for (int k : kids) rhs += 2.0 * w.beta[k];
      if (w.beta[node.id] < rhs - tol) {
        bad.push_back(node.id);
        break;
      }
    }
  }
  return bad;
}

inline void write_weights_csv(const std::string& path, const DgfWeights& w) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "simplex_id,alpha,beta,scheme\n";
  char buf[128];
  for (size_t j = 0; j < w.beta.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%s\n", j, w.alpha[j], w.beta[j],
                  scheme_name(w.scheme));
    out << buf;
  }
}

struct SmoothedArgmax {
  std::vector<double> point;
  double value = 0;
};

namespace detail {
// Entries this small are treated as boundary: clamped before logs so the
// geometric shrink of the smoothing parameters cannot produce -inf.
inline constexpr double kTinyMass = 1e-300;
}  // namespace detail

// omega(q); 0*log(0/.) contributes 0, so every vertex evaluates to exactly 0.
inline double omega_value(const Treeplex& t, const DgfWeights& w, const std::vector<double>& q) {
  double total = 0;
  for (const SimplexNode& node : t.simplexes) {
    const double qp = node.parent_variable == kRootParent ? 1.0 : q[node.parent_variable];
    double acc = 0;
    for (int v : node.variables) {
      const double qi = q[v];
      if (qi < -1e-12) throw std::invalid_argument("omega_value: negative entry");
      if (qi > 0) acc += qi * std::log(qi / std::max(qp, detail::kTinyMass));
    }
    total += w.beta[node.id] * acc;
  }
  return total;
}

// Gradient on the polytope (uses sum_{l in I_k} q_l = q_i for child k):
//   d omega / d q_i = beta_j (log(q_i/q_{p_j}) + 1) - sum_{k in D_j^i} beta_k.
inline std::vector<double> omega_gradient(const Treeplex& t, const DgfWeights& w,
                                          const std::vector<double>& q) {
  std::vector<double> g(q.size(), 0.0);
  for (const SimplexNode& node : t.simplexes) {
    const double qp_raw = node.parent_variable == kRootParent ? 1.0 : q[node.parent_variable];
    if (qp_raw <= 0) throw std::domain_error("omega_gradient: interior point required");
    const double qp = std::max(qp_raw, detail::kTinyMass);
    const double beta = w.beta[node.id];
    for (size_t pos = 0; pos < node.variables.size(); ++pos) {
      const int v = node.variables[pos];
      if (q[v] <= 0) throw std::domain_error("omega_gradient: interior point required");
      double child_beta = 0;
      for (int k : node.children[pos]) child_beta += w.beta[k];
      g[v] = beta * (std::log(std::max(q[v], detail::kTinyMass) / qp) + 1.0) - child_beta;
    }
  }
  return g;
}

// Quadratic form of the Hessian at q, valid on the relative interior:
//   sum_j beta_j [ sum_{i in I_j} (h_i^2/q_i - 2 h_i h_{p_j}/q_{p_j}) + h_{p_j}^2/q_{p_j} ]
// with the convention h_{p_j} = 0, q_{p_j} = 1 at roots.
inline double hessian_quadratic_form(const Treeplex& t, const DgfWeights& w,
                                     const std::vector<double>& q, const std::vector<double>& h) {
  double total = 0;
  for (const SimplexNode& node : t.simplexes) {
    const bool root = node.parent_variable == kRootParent;
    const double qp = root ? 1.0 : q[node.parent_variable];
    const double hp = root ? 0.0 : h[node.parent_variable];
    if (qp <= 0) throw std::domain_error("hessian_quadratic_form: interior point required");
    double acc = hp * hp / qp;
    for (int v : node.variables) {
      if (q[v] <= 0) throw std::domain_error("hessian_quadratic_form: interior point required");
      acc += h[v] * h[v] / q[v] - 2.0 * h[v] * hp / qp;
    }
    total += w.beta[node.id] * acc;
  }
  return total;
}

// argmax_{u in Q} <g, u> - omega(u), by one bottom-up and one top-down sweep.
// At simplex j the children's optimal values are folded into the local
// gradient, the local maximizer is a softmax at temperature beta_j, and the
// local value is beta_j * logsumexp(g/beta_j). Max-subtraction keeps the
// exponentials in range; the result is strictly interior.
inline SmoothedArgmax smoothed_argmax(const Treeplex& t, const DgfWeights& w,
                                      const std::vector<double>& g) {
  const int n = t.size();
  SmoothedArgmax out;
  out.point.assign(t.num_variables, 0.0);
  std::vector<double> val(n, 0.0);
  std::vector<double>& u = out.point;
  for (int j = n - 1; j >= 0; --j) {
    const SimplexNode& node = t.simplexes[j];
    const double beta = w.beta[j];
    double amax = -std::numeric_limits<double>::infinity();
    for (size_t pos = 0; pos < node.variables.size(); ++pos) {
      const int v = node.variables[pos];
      double adj = g[v];
      for (int k : node.children[pos]) adj += val[k];
      u[v] = adj / beta;
      amax = std::max(amax, u[v]);
    }
    double sum = 0;
    for (int v : node.variables) sum += std::exp(u[v] - amax);
    const double lse = amax + std::log(sum);
    val[j] = beta * lse;
    for (int v : node.variables) u[v] = std::max(std::exp(u[v] - lse), detail::kTinyMass);
  }
  for (int j = 0; j < n; ++j) {
    const SimplexNode& node = t.simplexes[j];
    const double mass = node.parent_variable == kRootParent ? 1.0 : u[node.parent_variable];
    if (node.parent_variable != kRootParent) {
      for (int v : node.variables) u[v] *= mass;
    }
  }
  for (int j : t.root_simplexes) out.value += val[j];
  for (double v : u) {
    if (!std::isfinite(v)) throw std::runtime_error("smoothed_argmax: non-finite output");
  }
  return out;
}

// Prox_x(xi) = argmin_u <xi, u> + V(u||x) where V is the Bregman distance of
// omega. Equals the smoothed argmax of grad omega(x) - xi.
inline std::vector<double> prox_map(const Treeplex& t, const DgfWeights& w,
                                    const std::vector<double>& x, const std::vector<double>& xi) {
  std::vector<double> g = omega_gradient(t, w, x);  // throws unless x is interior
  for (size_t i = 0; i < g.size(); ++i) g[i] -= xi[i];
  return smoothed_argmax(t, w, g).point;
}

// Weighted treeplex geometry bundle: weights plus the cached minimizer of
// omega and the associated width numbers. Immutable once built.
struct DgfContext {
  const Treeplex* treeplex = nullptr;
  TreeplexStats stats;
  DgfWeights weights;
  std::vector<double> center;        // argmin omega
  double omega_min = 0;              // omega(center)
  double width_upper_bound = 0;      // max omega - min omega >= true set width

  const Treeplex& tp() const { return *treeplex; }
};

inline DgfContext make_dgf_context(const Treeplex& t, TreeplexStats stats, DgfWeights w) {
  DgfContext ctx;
  ctx.treeplex = &t;
  ctx.stats = std::move(stats);
  ctx.weights = std::move(w);
  SmoothedArgmax c = smoothed_argmax(t, ctx.weights, std::vector<double>(t.num_variables, 0.0));
  ctx.center = std::move(c.point);
  ctx.omega_min = -c.value;  // max of -omega equals -min omega
  ctx.width_upper_bound = -ctx.omega_min;
  return ctx;
}

inline double omega_value(const DgfContext& ctx, const std::vector<double>& q) {
  return omega_value(ctx.tp(), ctx.weights, q);
}
inline std::vector<double> omega_gradient(const DgfContext& ctx, const std::vector<double>& q) {
  return omega_gradient(ctx.tp(), ctx.weights, q);
}
inline double hessian_quadratic_form(const DgfContext& ctx, const std::vector<double>& q,
                                     const std::vector<double>& h) {
  return hessian_quadratic_form(ctx.tp(), ctx.weights, q, h);
}
inline SmoothedArgmax smoothed_argmax(const DgfContext& ctx, const std::vector<double>& g) {
  return smoothed_argmax(ctx.tp(), ctx.weights, g);
}
inline std::vector<double> prox_map(const DgfContext& ctx, const std::vector<double>& x,
                                    const std::vector<double>& xi) {
  return prox_map(ctx.tp(), ctx.weights, x, xi);
}
inline const std::vector<double>& omega_center(const DgfContext& ctx) { return ctx.center; }

// Bregman distance V(u||x).
inline double bregman_distance(const DgfContext& ctx, const std::vector<double>& u,
                               const std::vector<double>& x) {
  const std::vector<double> g = omega_gradient(ctx, x);
  double dot = 0;
  for (size_t i = 0; i < g.size(); ++i) dot += g[i] * (u[i] - x[i]);
  return omega_value(ctx, u) - omega_value(ctx, x) - dot;
}

struct SetWidth {
  double empirical = 0;      // max omega over sampled vertices - omega(center)
  double theorem_bound = 0;  // M_Q^2 * 2^(d_Q+2) * log(m); certificate for
                             // the corollary-scaled scheme
};

// The empirical number upper-bounds the true set width max_q V(q||center):
// first-order optimality at the center makes V(q||center) <= omega(q) -
// omega(center), and omega attains its max (zero) at vertices.
inline SetWidth set_width_bound(const DgfContext& ctx, int samples = 256,
                                std::uint64_t seed = 1234) {
  SetWidth out;
  const Treeplex& t = ctx.tp();
  const double mq = static_cast<double>(ctx.stats.M_Q);
  out.theorem_bound = mq * mq * std::ldexp(1.0, ctx.stats.d_Q + 2) *
                      std::log(static_cast<double>(ctx.stats.m_max));
  double max_omega = -std::numeric_limits<double>::infinity();
  std::uint64_t state = seed;
  auto next = [&state]() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  std::vector<double> v(t.num_variables);
  std::vector<char> active(t.size());
  for (int s = 0; s < samples; ++s) {
    std::fill(v.begin(), v.end(), 0.0);
    std::fill(active.begin(), active.end(), 0);
    for (int j : t.root_simplexes) active[j] = 1;
    for (int j = 0; j < t.size(); ++j) {
      if (!active[j]) continue;
      const SimplexNode& node = t.simplexes[j];
      const size_t pick = next() % node.variables.size();
      v[node.variables[pick]] = 1.0;
      for (int k : node.children[pick]) active[k] = 1;
    }
    max_omega = std::max(max_omega, omega_value(ctx, v));
  }
  out.empirical = max_omega - ctx.omega_min;
  return out;
}

}  // namespace efgsolve
