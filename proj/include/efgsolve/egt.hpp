#pragma once

// Excessive gap technique on the smoothed sequence-form saddle point.
//
// The smoothed counterparts of the primal/dual value functions are
//
//   phi_bar_{mu2}(x)  = max_y phi(x,y) - mu2*omega_Y(y)
//   phi_under_{mu1}(y) = min_x phi(x,y) + mu1*omega_X(x)
//
// whose optimizers are the smoothed best responses y_{mu2}(x) and
// x_{mu1}(y), both closed-form treeplex argmax sweeps. The method keeps the
// excessive gap condition phi_bar_{mu2}(x) <= phi_under_{mu1}(y) while
// shrinking exactly one smoothing parameter per iteration with
// tau_t = 2/(t+3), alternating sides: even iterations refresh x and shrink
// mu1, odd iterations mirror. With initial parameters satisfying
// mu1*mu2 = ||A||^2/(phi_X*phi_Y) the residual obeys the anytime bound
//
//   eps_sad(z_t) <= 4||A|| / (t+1) * sqrt(Omega_X*Omega_Y/(phi_X*phi_Y)).
//
// Every A*v or A^T*v product below counts as one tree traversal.
// Initialization performs exactly three (the third warms up x_{mu1}(y0),
// which also certifies the gap condition at t = 0); each step performs
// exactly three.

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "efgsolve/dgf.hpp"
#include "efgsolve/sequence_form.hpp"
#include "efgsolve/telemetry.hpp"

namespace efgsolve {

struct EgtState {
  std::vector<double> x, y;
  double mu1 = 0, mu2 = 0;
  long long t = 0;
  long long traversals = 0;
  std::vector<double> x_smoothed_warm;  // x_{mu1}(y^0), kept from init
};

namespace detail {

struct EgtOps {
  const SequenceFormProblem& p;
  const DgfContext& cx;
  const DgfContext& cy;
  long long* traversals;

  std::vector<double> a_times(const std::vector<double>& y) const {
    ++*traversals;
    std::vector<double> out(p.X.num_variables);
    p.A.multiply(y, out);
    return out;
  }
  std::vector<double> at_times(const std::vector<double>& x) const {
    ++*traversals;
    std::vector<double> out(p.Y.num_variables);
    p.A.multiply_transpose(x, out);
    return out;
  }

  // y_{mu2}(x) and the smoothed value phi_bar_{mu2}(x).
  struct Response {
    std::vector<double> point;
    double value;
  };
  Response y_response(const std::vector<double>& x, double mu2) const {
    std::vector<double> g = at_times(x);
    for (int i = 0; i < p.Y.num_variables; ++i) g[i] = (g[i] + p.a2[i]) / mu2;
    SmoothedArgmax sm = smoothed_argmax(cy, g);
    double lin = p.v0;
    for (int i = 0; i < p.X.num_variables; ++i) lin += p.a1[i] * x[i];
    return {std::move(sm.point), lin + mu2 * sm.value};
  }
  // x_{mu1}(y) and phi_under_{mu1}(y).
  Response x_response(const std::vector<double>& y, double mu1) const {
    std::vector<double> g = a_times(y);
    for (int i = 0; i < p.X.num_variables; ++i) g[i] = -(g[i] + p.a1[i]) / mu1;
    SmoothedArgmax sm = smoothed_argmax(cx, g);
    double lin = p.v0;
    for (int i = 0; i < p.Y.num_variables; ++i) lin += p.a2[i] * y[i];
    return {std::move(sm.point), lin - mu1 * sm.value};
  }
};

inline std::vector<double> blend(const std::vector<double>& a, const std::vector<double>& b,
                                 double tau) {
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = (1 - tau) * a[i] + tau * b[i];
  return out;
}

}  // namespace detail

// Default smoothing level: mu1 = mu2 = mu_scale * ||A|| / sqrt(phi_X*phi_Y).
// At mu_scale = 1 the product constraint behind the anytime bound holds;
// smaller values trade the certificate for practical speed.
inline double egt_default_mu(const SequenceFormProblem& p, const DgfContext& cx,
                             const DgfContext& cy, double mu_scale) {
  const double a = p.a_norm > 0 ? p.a_norm : 1.0;
  return mu_scale * a / std::sqrt(cx.weights.ell1_modulus * cy.weights.ell1_modulus);
}

inline EgtState egt_init(const SequenceFormProblem& p, const DgfContext& cx, const DgfContext& cy,
                         double mu_scale = 1.0) {
  if (!(mu_scale > 0)) throw std::invalid_argument("egt_init: mu_scale must be positive");
  EgtState s;
  s.mu1 = s.mu2 = egt_default_mu(p, cx, cy, mu_scale);
  detail::EgtOps ops{p, cx, cy, &s.traversals};
  const std::vector<double>& x_center = omega_center(cx);
  auto y0 = ops.y_response(x_center, s.mu2);          // traversal 1
  std::vector<double> grad = ops.a_times(y0.point);   // traversal 2
  for (int i = 0; i < p.X.num_variables; ++i) grad[i] = (grad[i] + p.a1[i]) / s.mu1;
  s.x = prox_map(cx, x_center, grad);
  auto warm = ops.x_response(y0.point, s.mu1);        // traversal 3
  s.x_smoothed_warm = std::move(warm.point);
  s.y = std::move(y0.point);
  return s;
}

inline void egt_step(EgtState& s, const SequenceFormProblem& p, const DgfContext& cx,
                     const DgfContext& cy) {
  detail::EgtOps ops{p, cx, cy, &s.traversals};
  const double tau = 2.0 / static_cast<double>(s.t + 3);
  if (s.t % 2 == 0) {
    // x-focused step; shrinks mu1.
    auto xs = ops.x_response(s.y, s.mu1);
    std::vector<double> x_hat = detail::blend(s.x, xs.point, tau);
    auto ys = ops.y_response(x_hat, s.mu2);
    std::vector<double> y_new = detail::blend(s.y, ys.point, tau);
    std::vector<double> grad = ops.a_times(ys.point);
    const double step = tau / ((1 - tau) * s.mu1);
    for (int i = 0; i < p.X.num_variables; ++i) grad[i] = step * (grad[i] + p.a1[i]);
    std::vector<double> x_tilde = prox_map(cx, xs.point, grad);
    s.x = detail::blend(s.x, x_tilde, tau);
    s.y = std::move(y_new);
    s.mu1 *= (1 - tau);
  } else {
    // Mirrored y-focused step; shrinks mu2. The maximizer ascends, hence the
    // negated gradient in its prox step.
    auto ys = ops.y_response(s.x, s.mu2);
    std::vector<double> y_hat = detail::blend(s.y, ys.point, tau);
    auto xs = ops.x_response(y_hat, s.mu1);
    std::vector<double> x_new = detail::blend(s.x, xs.point, tau);
    std::vector<double> grad = ops.at_times(xs.point);
    const double step = tau / ((1 - tau) * s.mu2);
    for (int i = 0; i < p.Y.num_variables; ++i) grad[i] = -step * (grad[i] + p.a2[i]);
    std::vector<double> y_tilde = prox_map(cy, ys.point, grad);
    s.y = detail::blend(s.y, y_tilde, tau);
    s.x = std::move(x_new);
    s.mu2 *= (1 - tau);
  }
  ++s.t;
  for (double v : s.x) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("egt_step: non-finite x iterate at t=" + std::to_string(s.t));
    }
  }
  for (double v : s.y) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("egt_step: non-finite y iterate at t=" + std::to_string(s.t));
    }
  }
}

// Both sides of the excessive gap condition at the current iterate,
// evaluated off the traversal counter (telemetry path).
struct ExcessiveGap {
  double phi_bar;    // phi_bar_{mu2}(x)
  double phi_under;  // phi_under_{mu1}(y)
};
inline ExcessiveGap excessive_gap(const EgtState& s, const SequenceFormProblem& p,
                                  const DgfContext& cx, const DgfContext& cy) {
  long long scratch = 0;
  detail::EgtOps ops{p, cx, cy, &scratch};
  return {ops.y_response(s.x, s.mu2).value, ops.x_response(s.y, s.mu1).value};
}

// Lipschitz constants of the smoothed value functions' gradients.
inline double egt_lipschitz_l1(const SequenceFormProblem& p, const DgfContext& cy, double mu2) {
  return p.a_norm * p.a_norm / (cy.weights.ell1_modulus * mu2);
}
inline double egt_lipschitz_l2(const SequenceFormProblem& p, const DgfContext& cx, double mu1) {
  return p.a_norm * p.a_norm / (cx.weights.ell1_modulus * mu1);
}

// Residual guarantee at iteration t (valid for t >= 1 under compliant
// initialization and certified weights). Set widths use the cached upper
// bound max(omega) - min(omega).
inline double egt_anytime_bound(const SequenceFormProblem& p, const DgfContext& cx,
                                const DgfContext& cy, long long t) {
  const double omega_x = cx.width_upper_bound;
  const double omega_y = cy.width_upper_bound;
  return 4.0 * p.a_norm / static_cast<double>(t + 1) *
         std::sqrt(omega_x * omega_y / (cx.weights.ell1_modulus * cy.weights.ell1_modulus));
}

struct EgtRunOptions {
  double mu_scale = 1.0;
  double target_eps = 1e-6;
  long long max_iters = 10000;
  long long telemetry_interval = 0;  // 0: power-of-two checkpoints
};

struct EgtResult {
  EgtState state;
  std::vector<ConvergenceRecord> records;
  bool reached_target = false;
  double final_eps = 0;
};

template <typename Clock>
inline double elapsed_ms(const Clock& start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

inline EgtResult egt_run(const SequenceFormProblem& p, const DgfContext& cx, const DgfContext& cy,
                         const EgtRunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  EgtResult out;
  out.state = egt_init(p, cx, cy, opt.mu_scale);
  EgtState& s = out.state;
  double eps = saddle_residual(p, s.x, s.y);
  out.records.push_back({0, s.traversals, eps, s.mu1, s.mu2, elapsed_ms(start)});
  out.final_eps = eps;
  if (eps <= opt.target_eps) {
    out.reached_target = true;
    return out;
  }
  while (s.t < opt.max_iters) {
    egt_step(s, p, cx, cy);
    const bool last = s.t == opt.max_iters;
    if (is_checkpoint(s.t, opt.telemetry_interval) || last) {
      eps = saddle_residual(p, s.x, s.y);
      out.records.push_back({s.t, s.traversals, eps, s.mu1, s.mu2, elapsed_ms(start)});
      out.final_eps = eps;
      if (eps <= opt.target_eps) {
        out.reached_target = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace efgsolve
