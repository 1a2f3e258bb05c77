#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oscimax/norms.hpp"

using namespace oscimax;
using oscimax::testing::Rng;

TEST_CASE("norms against mpmath") {
  const Function step = PiecewiseConstantFn({-1.0, 0.0, 2.0}, {1.0, -3.0});
  CHECK(weighted_l1(step, 1.5) == doctest::Approx(14.188225099390856).epsilon(1e-14));
  CHECK(llogl_norm(step) == doctest::Approx(11.775271971290298).epsilon(1e-14));
  CHECK_FALSE(derivative_lp(step, 2.0).has_value());
  CHECK_FALSE(cpl_norm(step, 2.0, 1.5).has_value());

  const Function b = smooth_bump(0, 1, 1);
  CHECK(weighted_l1(b, 1.5) == doctest::Approx(16.0 / 15.0 + 0.2188034188034188).epsilon(1e-12));
  CHECK(llogl_norm(b) == doctest::Approx(1.3274820279473559).epsilon(1e-11));
  CHECK(*cpl_norm(b, 2.0, 1.5) == doctest::Approx(16.0 / 15.0 + 0.2188034188034188 + 1.5614401167176531));

  const Function b2 = smooth_bump(0.7, 2.0, 1.5);
  CHECK(llogl_norm(b2) == doctest::Approx(4.3076740895952052).epsilon(1e-11));
  CHECK(lp_norm(b2, 3.0) == doctest::Approx(1.6635127389273454).epsilon(1e-12));

  const auto rep = norm_report(step, 2.0, 1.5);
  CHECK(rep.weighted_method == "exact");
  CHECK(rep.l1 == 7.0);
}

TEST_CASE("exact step maximal functions") {
  const PiecewiseConstantFn chi = char_fn(1.0);
  CHECK(hl_maximal_exact(chi, 3.0) == 0.25);
  CHECK(hl_maximal_exact(chi, 0.0) == 1.0);
  // Breakpoint: mean of the one-sided limits.
  CHECK(hl_maximal_exact(chi, 1.0) == 0.5);
  // Atom: |∫f| vanishes over symmetric windows, ∫|f| does not.
  const PiecewiseConstantFn a = atom_fbeta(0.5);
  CHECK(zero_phase_maximal_exact(a, 0.0) == 0.0);
  CHECK(hl_maximal_exact(a, 0.0) == 1.0);
}

TEST_CASE("property: exact maximal function dominates sampled averages") {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const auto f = oscimax::testing::random_step(rng, false);
    const double x = rng.uniform(-7.0, 7.0);
    const double M = hl_maximal_exact(f, x);
    const double Mz = zero_phase_maximal_exact(f, x);
    CHECK(Mz <= M + 1e-15);
    for (int k = 0; k < 20; ++k) {
      const double r = rng.log_uniform(1e-3, 50.0);
      CHECK(f.abs_integral(x - r, x + r) / (2 * r) <= M + 1e-12);
      CHECK(std::abs(f.integral(x - r, x + r)) / (2 * r) <= Mz + 1e-12);
    }
  }
}

TEST_CASE("property: embedding ‖f‖_q ≤ 2‖f‖_{C_{p,0}}") {
  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const auto b = oscimax::testing::random_bump(rng);
    for (double q : {1.0, 2.0, HUGE_VAL}) {
      const auto c = check_embedding_q(b, 2.0, q);
      CHECK(c.pass);
      CHECK(c.lhs <= c.rhs);
    }
  }
}

TEST_CASE("L log L lemma on step functions and bumps") {
  const auto c = check_llogl_lemma(char_fn(1.0), -1.0, 1.0, 10.0);
  CHECK(c.pass);
  CHECK(c.minimal_constant <= 10.0);
  const auto d = check_llogl_lemma(smooth_bump(0, 0.3, 3.0), -2.0, 2.0, 10.0);
  CHECK(d.pass);
  CHECK(d.lhs <= d.rhs);
}

TEST_CASE("weight admissibility") {
  const auto psi2 = weight_admissibility(psi_weight(2.0), 2.0);
  CHECK(psi2.lower_pass);
  CHECK(psi2.doubling_pass);
  CHECK(psi2.tail_pass);
  CHECK(psi2.tail_exponent > 1.5);

  const auto psi1 = weight_admissibility(psi_weight(1.0), 2.0);
  CHECK(psi1.lower_pass);
  CHECK_FALSE(psi1.tail_pass);
  CHECK(psi1.tail_exponent < 1.2);
  // Partial sums keep growing for ψ_1.
  const auto& s = psi1.tail_partial_sums;
  CHECK(s.back() - s[s.size() / 2] > 0.3);

  CHECK(weight_admissibility(power_weight(2.0), 2.0).all_pass());
  CHECK_FALSE(weight_admissibility(expression_weight("1"), 2.0).lower_pass);
  CHECK_FALSE(weight_admissibility(expression_weight("exp(|x|)"), 2.0).doubling_pass);
}
