#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "efgsolve/dgf.hpp"
#include "efgsolve/leduc.hpp"
#include "efgsolve/sequence_form.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace efgsolve;
using namespace efgsolve::testing;

namespace {

DgfContext context_with(const Treeplex& t, WeightScheme scheme, double c = 2.0) {
  const TreeplexStats stats = compute_stats(t);
  DgfWeights w;
  switch (scheme) {
    case WeightScheme::kRecurrence: w = make_recurrence_weights(t, stats, c); break;
    case WeightScheme::kPracticalNew: w = make_practical_weights(t, stats); break;
    case WeightScheme::kClosedForm: w = make_closed_form_weights(t, stats, false); break;
    case WeightScheme::kClosedFormScaled: w = make_closed_form_weights(t, stats, true); break;
    case WeightScheme::kPrior: w = make_prior_weights(t, stats); break;
  }
  return make_dgf_context(t, stats, std::move(w));
}

}  // namespace

TEST_CASE("recurrence weights on a lone simplex") {
  const Treeplex t = single_simplex(4);
  const auto w = make_recurrence_weights(t, compute_stats(t), 2.0);
  REQUIRE(w.alpha[0] == 1.0);
  REQUIRE(w.beta[0] == 1.0);  // root branch: beta equals alpha
  REQUIRE(w.ell1_modulus == 1.0);
}

TEST_CASE("recurrence weights on the nine-simplex example, c = 2") {
  const Treeplex t = figure1_treeplex();
  const auto w = make_recurrence_weights(t, compute_stats(t), 2.0);
  for (int j = 3; j <= 8; ++j) {
    REQUIRE(w.alpha[j] == 1.0);
    REQUIRE(w.beta[j] == 2.0);
  }
  // Simplex 2 aggregates its product pair: alpha = 1 + 2*(1*2/(2-1)) = 5.
  REQUIRE(w.alpha[2] == 5.0);
  REQUIRE(w.beta[2] == 10.0);
  REQUIRE(w.alpha[1] == 3.0);
  REQUIRE(w.beta[1] == 3.0);  // root
  REQUIRE(w.alpha[0] == 11.0);
  REQUIRE(w.beta[0] == 11.0);  // root
  REQUIRE(w.ell1_modulus == 1.0 / 6.0);
  // Independent recomputation (different traversal) confirms the recurrence.
  REQUIRE(recurrence_violations(t, w).empty());
}

TEST_CASE("recurrence weights reject c <= 1") {
  const Treeplex t = figure1_treeplex();
  const auto stats = compute_stats(t);
  REQUIRE_THROWS_AS(make_recurrence_weights(t, stats, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(make_recurrence_weights(t, stats, 0.5), std::invalid_argument);
}

TEST_CASE("practical weights") {
  const Treeplex leaf = single_simplex(3);
  const auto wl = make_practical_weights(leaf, compute_stats(leaf));
  REQUIRE(wl.alpha[0] == 1.0);
  REQUIRE(wl.beta[0] == 1.0);
  REQUIRE_FALSE(wl.certified);
  // On a childless treeplex the recurrence output is identical.
  const auto wr = make_recurrence_weights(leaf, compute_stats(leaf), 2.0);
  REQUIRE(wl.beta == wr.beta);

  const GameTree g = build_leduc(LeducConfig{.cards = 3});
  const SequenceFormProblem p = to_sequence_form(g);
  const auto w = make_practical_weights(p.X, p.x_stats);
  for (size_t j = 0; j < w.beta.size(); ++j) {
    REQUIRE(w.beta[j] == w.alpha[j]);
    REQUIRE(w.beta[j] > 0);
    REQUIRE(std::isfinite(w.beta[j]));
  }
}

TEST_CASE("closed-form weights") {
  const Treeplex leaf = single_simplex(2);
  REQUIRE(make_closed_form_weights(leaf, compute_stats(leaf), false).beta[0] == 2.0);

  const Treeplex t = figure1_treeplex();
  const auto stats = compute_stats(t);
  const auto w = make_closed_form_weights(t, stats, false);
  // Simplex 2: depth 1, truncated norm 3 below it: beta = 2 + 2*(3-1) = 6.
  REQUIRE(w.beta[2] == 6.0);
  REQUIRE(w.beta[1] == 4.0);
  REQUIRE(w.beta[0] == 16.0);
  REQUIRE(w.ell1_modulus == 1.0 / 6.0);
  const auto ws = make_closed_form_weights(t, stats, true);
  REQUIRE(ws.beta[2] == 36.0);
  REQUIRE(ws.ell1_modulus == 1.0);
}

TEST_CASE("prior-scheme weights") {
  const Treeplex leaf = single_simplex(2);
  REQUIRE(make_prior_weights(leaf, compute_stats(leaf)).beta[0] == 1.0);

  const Treeplex t = figure1_treeplex();
  const auto w = make_prior_weights(t, compute_stats(t));
  REQUIRE(w.beta[2] == 6.0);   // 2^1 * 3
  REQUIRE(w.beta[0] == 16.0);  // 2^2 * 4
  REQUIRE(w.ell1_modulus == 1.0 / 9.0);
}

TEST_CASE("closed-form weights fail the child-doubling inequality where expected") {
  // The doubling inequality does not survive product branches or unit
  // truncated norms; the checker reports rather than asserts.
  const Treeplex t = figure1_treeplex();
  const auto w = make_closed_form_weights(t, compute_stats(t), false);
  REQUIRE(child_doubling_violations(t, w) == std::vector<int>{1, 2});
  // And the closed form is not an exact recurrence solution at the roots.
  REQUIRE(recurrence_violations(t, w) == std::vector<int>{0, 1});
  // The recurrence construction itself is clean on random instances.
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Treeplex r = random_treeplex(rng);
    const auto wr = make_recurrence_weights(r, compute_stats(r), 2.0);
    REQUIRE(recurrence_violations(r, wr).empty());
  }
}

TEST_CASE("omega is zero at vertices") {
  const Treeplex t = figure1_treeplex();
  const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);
  for (const auto& v : enumerate_vertices(t)) {
    REQUIRE(omega_value(ctx, v) == 0.0);
  }
}

TEST_CASE("omega of the uniform distribution on a simplex") {
  for (int m : {2, 3, 7}) {
    const Treeplex t = single_simplex(m);
    const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);  // beta = 1
    std::vector<double> q(m, 1.0 / m);
    REQUIRE(omega_value(ctx, q) == Catch::Approx(-std::log(m)).epsilon(1e-12));
  }
}

TEST_CASE("omega matches the behavioral-decomposition route") {
  const Treeplex t = figure1_treeplex();
  const DgfContext ctx = context_with(t, WeightScheme::kClosedForm);
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> q = random_interior_point(t, rng);
    // Independent route: per-simplex local entropy scaled by parent mass.
    const std::vector<double> local = behavioral_from_sequence(t, q);
    double expected = 0;
    for (const SimplexNode& node : t.simplexes) {
      const double mass = node.parent_variable == kRootParent ? 1.0 : q[node.parent_variable];
      double ent = 0;
      for (int v : node.variables) ent += local[v] * std::log(local[v]);
      expected += ctx.weights.beta[node.id] * mass * ent;
    }
    REQUIRE(omega_value(ctx, q) == Catch::Approx(expected).margin(1e-10));
  }
}

TEST_CASE("gradient on a 2-simplex at the uniform point") {
  const Treeplex t = single_simplex(2);
  const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);
  const auto g = omega_gradient(ctx, {0.5, 0.5});
  REQUIRE(g[0] == Catch::Approx(std::log(0.5) + 1.0));
  REQUIRE(g[1] == Catch::Approx(std::log(0.5) + 1.0));
}

TEST_CASE("gradient matches central differences") {
  Rng rng(23);
  const Treeplex fig = figure1_treeplex();
  const Treeplex rnd = random_treeplex(rng);
  for (const Treeplex* t : {&fig, &rnd}) {
    const DgfContext ctx = context_with(*t, WeightScheme::kRecurrence);
    for (int trial = 0; trial < 100; ++trial) {
      const std::vector<double> q = random_interior_point(*t, rng, 0.15);
      const auto g = omega_gradient(ctx, q);
      const auto fd = oracle::fd_gradient(*t, ctx.weights.beta, q);
      double scale = 1.0;
      for (double v : g) scale = std::max(scale, std::abs(v));
      REQUIRE(linf_distance(g, fd) / scale < 1e-6);
    }
  }
}

TEST_CASE("gradient entries subtract the child weights") {
  const Treeplex t = figure1_treeplex();
  const DgfContext ctx = context_with(t, WeightScheme::kClosedForm);
  Rng rng(29);
  const std::vector<double> q = random_interior_point(t, rng);
  const auto g = omega_gradient(ctx, q);
  // Variable 6 carries the product pair (simplexes 7 and 8).
  const double expected = ctx.weights.beta[2] * (std::log(q[6] / q[0]) + 1.0) -
                          (ctx.weights.beta[7] + ctx.weights.beta[8]);
  REQUIRE(g[6] == Catch::Approx(expected).epsilon(1e-12));
  REQUIRE_THROWS_AS(omega_gradient(ctx, std::vector<double>(t.num_variables, 0.0)),
                    std::domain_error);
}

TEST_CASE("hessian quadratic form on a 2-simplex") {
  const Treeplex t = single_simplex(2);
  const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);  // beta = 1
  REQUIRE(hessian_quadratic_form(ctx, {0.5, 0.5}, {1.0, -1.0}) == Catch::Approx(4.0));
}

TEST_CASE("hessian quadratic form matches finite differences") {
  Rng rng(31);
  const Treeplex fig = figure1_treeplex();
  const Treeplex rnd = random_treeplex(rng);
  for (const Treeplex* t : {&fig, &rnd}) {
    const DgfContext ctx = context_with(*t, WeightScheme::kRecurrence);
    for (int trial = 0; trial < 100; ++trial) {
      const std::vector<double> q = random_interior_point(*t, rng, 0.2);
      const std::vector<double> h = random_direction(t->num_variables, rng);
      const double exact = hessian_quadratic_form(ctx, q, h);
      const double fd = oracle::fd_hessian_quadratic(*t, ctx.weights.beta, q, h);
      REQUIRE(std::abs(exact - fd) / std::max(1.0, std::abs(exact)) < 1e-5);
    }
  }
}

TEST_CASE("strong convexity lower bounds for recurrence weights") {
  Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const Treeplex t = random_treeplex(rng);
    const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);
    const double mq = static_cast<double>(ctx.stats.M_Q);
    for (int rep = 0; rep < 50; ++rep) {
      const std::vector<double> q = random_interior_point(t, rng, 0.05);
      const std::vector<double> h = random_direction(t.num_variables, rng);
      const double quad = hessian_quadratic_form(ctx, q, h);
      // l2 modulus 1.
      REQUIRE(quad >= norm2_squared(h) * (1 - 1e-9));
      // l1 modulus 1/M_Q.
      const double l1 = norm1(h);
      REQUIRE(quad >= l1 * l1 / mq * (1 - 1e-9));
      // Intermediate bound: the form dominates sum h_i^2 / q_i.
      double hsq_over_q = 0;
      for (int i = 0; i < t.num_variables; ++i) hsq_over_q += h[i] * h[i] / q[i];
      REQUIRE(quad >= hsq_over_q * (1 - 1e-9));
    }
  }
}

TEST_CASE("gradient monotonicity certifies the same moduli") {
  Rng rng(41);
  const Treeplex t = figure1_treeplex();
  const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);
  const double mq = static_cast<double>(ctx.stats.M_Q);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> qa = random_interior_point(t, rng, 0.05);
    const std::vector<double> qb = random_interior_point(t, rng, 0.05);
    const auto ga = omega_gradient(ctx, qa);
    const auto gb = omega_gradient(ctx, qb);
    std::vector<double> dg(ga.size()), dq(ga.size());
    for (size_t i = 0; i < ga.size(); ++i) {
      dg[i] = ga[i] - gb[i];
      dq[i] = qa[i] - qb[i];
    }
    const double inner = dot(dg, dq);
    REQUIRE(inner >= norm2_squared(dq) * (1 - 1e-9) - 1e-12);
    const double l1 = norm1(dq);
    REQUIRE(inner >= l1 * l1 / mq * (1 - 1e-9) - 1e-12);
  }
}

TEST_CASE("smoothed argmax with zero gradient is the uniform point") {
  for (int m : {2, 5}) {
    const Treeplex t = single_simplex(m);
    const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);  // beta = 1
    const auto sm = smoothed_argmax(ctx, std::vector<double>(m, 0.0));
    for (double u : sm.point) REQUIRE(u == Catch::Approx(1.0 / m).epsilon(1e-12));
    REQUIRE(sm.value == Catch::Approx(std::log(m)).epsilon(1e-12));
  }
}

TEST_CASE("smoothed argmax concentrates on dominant gradients") {
  const Treeplex t = single_simplex(3);
  const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);
  std::vector<double> g = {50.0, 0.0, 0.0};
  const auto sm = smoothed_argmax(ctx, g);
  REQUIRE(sm.point[0] >= 1.0 - 1e-3);
  REQUIRE(sm.value == Catch::Approx(50.0).margin(1e-3));
  for (double u : sm.point) REQUIRE(u > 0.0);
}

TEST_CASE("smoothed argmax matches the projected-gradient and grid oracles") {
  const Treeplex t = chain_treeplex();
  const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);
  Rng rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> g = random_direction(t.num_variables, rng);
    for (double& v : g) v *= 2.0;
    const auto sm = smoothed_argmax(ctx, g);
    REQUIRE(feasibility_error(t, sm.point) < 1e-10);
    Rng orng(100 + trial);
    const auto pgd = oracle::brute_argmax(t, ctx.weights.beta, g, orng);
    REQUIRE(linf_distance(sm.point, pgd) < 1e-6);
    const auto grid = oracle::grid_refine(t, [&](const std::vector<double>& b) {
      // maximize <g,u> - omega(u)  ==  minimize the negation
      std::vector<double> u = sequence_from_behavioral(t, b);
      double lin = 0;
      for (int i = 0; i < t.num_variables; ++i) lin += g[i] * u[i];
      return -(lin - oracle::omega_reference(t, ctx.weights.beta, u));
    });
    REQUIRE(linf_distance(sm.point, grid) < 1e-4);
  }
}

TEST_CASE("smoothed argmax value is convex in the gradient") {
  const Treeplex t = figure1_treeplex();
  const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);
  Rng rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> g1 = random_direction(t.num_variables, rng);
    std::vector<double> g2 = random_direction(t.num_variables, rng);
    std::vector<double> mid(g1.size());
    for (size_t i = 0; i < g1.size(); ++i) mid[i] = 0.5 * (g1[i] + g2[i]);
    const double vm = smoothed_argmax(ctx, mid).value;
    const double v1 = smoothed_argmax(ctx, g1).value;
    const double v2 = smoothed_argmax(ctx, g2).value;
    REQUIRE(vm <= 0.5 * (v1 + v2) + 1e-10);
  }
}

TEST_CASE("smoothed argmax outputs stay feasible under large gradients") {
  const Treeplex t = figure1_treeplex();
  const DgfContext ctx = context_with(t, WeightScheme::kPracticalNew);
  Rng rng(53);
  for (double scale : {1.0, 1e3, 1e6}) {
    std::vector<double> g = random_direction(t.num_variables, rng);
    for (double& v : g) v *= scale;
    const auto sm = smoothed_argmax(ctx, g);
    REQUIRE(std::isfinite(sm.value));
    REQUIRE(feasibility_error(t, sm.point) < 1e-10);
    for (double u : sm.point) REQUIRE(u >= 0.0);
  }
}

TEST_CASE("prox of a zero step returns the center") {
  const Treeplex t = figure1_treeplex();
  const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);
  Rng rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> x = random_interior_point(t, rng);
    const auto u = prox_map(ctx, x, std::vector<double>(t.num_variables, 0.0));
    REQUIRE(linf_distance(u, x) < 1e-12);
  }
}

TEST_CASE("prox on a simplex is the multiplicative-weights update") {
  const Treeplex t = single_simplex(3);
  const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);  // beta = 1
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x = {0.2, 0.5, 0.3};
    const std::vector<double> xi = random_direction(3, rng);
    const auto u = prox_map(ctx, x, xi);
    double z = 0;
    std::vector<double> expected(3);
    for (int i = 0; i < 3; ++i) z += (expected[i] = x[i] * std::exp(-xi[i]));
    for (int i = 0; i < 3; ++i) expected[i] /= z;
    REQUIRE(linf_distance(u, expected) < 1e-12);
  }
}

TEST_CASE("prox matches the brute-force oracle on a chain") {
  const Treeplex t = chain_treeplex();
  const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);
  Rng rng(67);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<double> x = random_interior_point(t, rng, 0.2);
    std::vector<double> xi = random_direction(t.num_variables, rng);
    const auto u = prox_map(ctx, x, xi);
    Rng orng(200 + trial);
    const auto brute = oracle::brute_prox(t, ctx.weights.beta, x, xi, orng);
    REQUIRE(linf_distance(u, brute) < 1e-4);
  }
  REQUIRE_THROWS_AS(prox_map(ctx, std::vector<double>(t.num_variables, 0.0),
                             std::vector<double>(t.num_variables, 0.0)),
                    std::domain_error);
}

TEST_CASE("omega center of a simplex is uniform") {
  const Treeplex t = single_simplex(4);
  const DgfContext ctx = context_with(t, WeightScheme::kRecurrence);
  for (double u : omega_center(ctx)) REQUIRE(u == Catch::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("omega center satisfies first-order optimality") {
  const Treeplex t = figure1_treeplex();
  for (WeightScheme s : {WeightScheme::kRecurrence, WeightScheme::kClosedFormScaled}) {
    const DgfContext ctx = context_with(t, s);
    const auto g = omega_gradient(ctx, omega_center(ctx));
    // Stationarity: within each simplex, gradient entries corrected by the
    // children's multipliers are constant; solve for the multipliers
    // bottom-up and check the spread.
    std::vector<double> lambda(t.size(), 0.0);
    for (int j = t.size() - 1; j >= 0; --j) {
      const SimplexNode& node = t.simplexes[j];
      double lo = 1e300, hi = -1e300;
      for (size_t pos = 0; pos < node.variables.size(); ++pos) {
        double r = g[node.variables[pos]];
        for (int k : node.children[pos]) r += lambda[k];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      lambda[j] = 0.5 * (lo + hi);
      REQUIRE(hi - lo < 1e-8 * std::max(1.0, std::abs(lambda[j])));
    }
  }
}

TEST_CASE("center value obeys the scaled-width theorem bound") {
  Rng rng(71);
  const Treeplex fig = figure1_treeplex();
  const Treeplex rnd = random_treeplex(rng);
  const Treeplex lone = single_simplex(5);
  for (const Treeplex* t : {&fig, &rnd, &lone}) {
    const DgfContext ctx = context_with(*t, WeightScheme::kClosedFormScaled);
    const double mq = static_cast<double>(ctx.stats.M_Q);
    const double bound = mq * mq * std::ldexp(1.0, ctx.stats.d_Q + 2) * std::log(ctx.stats.m_max);
    REQUIRE(ctx.omega_min >= -bound);
  }
}

TEST_CASE("set width: lone simplex under scaled weights") {
  for (int m : {2, 4, 9}) {
    const Treeplex t = single_simplex(m);
    const DgfContext ctx = context_with(t, WeightScheme::kClosedFormScaled);  // beta = 2
    const SetWidth sw = set_width_bound(ctx);
    REQUIRE(sw.empirical == Catch::Approx(2.0 * std::log(m)).epsilon(1e-12));
    REQUIRE(sw.theorem_bound == Catch::Approx(4.0 * std::log(m)).epsilon(1e-12));
    REQUIRE(sw.empirical <= sw.theorem_bound);
  }
}

TEST_CASE("set width bound holds and grows with the deck") {
  const Treeplex fig = figure1_treeplex();
  const DgfContext cf = context_with(fig, WeightScheme::kClosedFormScaled);
  const SetWidth sf = set_width_bound(cf);
  REQUIRE(sf.empirical <= sf.theorem_bound);

  double prev_bound = 0;
  for (int k : {2, 3}) {
    const SequenceFormProblem p = to_sequence_form(build_leduc(LeducConfig{.cards = k}));
    const DgfContext ctx = context_with(p.X, WeightScheme::kClosedFormScaled);
    const SetWidth sw = set_width_bound(ctx);
    REQUIRE(sw.empirical <= sw.theorem_bound);
    REQUIRE(sw.theorem_bound > prev_bound);
    prev_bound = sw.theorem_bound;
  }
}

TEST_CASE("the scale knob multiplies the function and its modulus") {
  const Treeplex t = figure1_treeplex();
  const TreeplexStats stats = compute_stats(t);
  DgfWeights w = make_recurrence_weights(t, stats, 2.0);
  DgfWeights scaled = w;
  scale_weights(scaled, 3.5);
  REQUIRE(scaled.ell1_modulus == Catch::Approx(3.5 * w.ell1_modulus));
  Rng rng(73);
  const std::vector<double> q = random_interior_point(t, rng);
  REQUIRE(omega_value(t, scaled, q) == Catch::Approx(3.5 * omega_value(t, w, q)).epsilon(1e-12));
}
