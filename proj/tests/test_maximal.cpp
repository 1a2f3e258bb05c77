#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oscimax/config.hpp"
#include "oscimax/error.hpp"
#include "oscimax/maximal.hpp"
#include "oscimax/norms.hpp"

using namespace oscimax;
using oscimax::testing::Rng;

TEST_CASE("M_γ χ_[−1,1] for γ = t², Fresnel oracle") {
  // sup over r computed from closed-form Fresnel integrals in mpmath
  const Phase ph = Phase::laurent_monomial(2);
  const auto s3 = maximal_value(char_fn(1.0), ph, 3.0);
  CHECK(s3.value == doctest::Approx(0.08213792641121787).epsilon(1e-7));
  CHECK(std::abs(s3.value - 0.08213792641121787) <= s3.err + 1e-9);
  CHECK(s3.r_star == doctest::Approx(2.5847725451073449).epsilon(1e-4));

  const auto s5 = maximal_value(char_fn(1.0), ph, 5.0);
  CHECK(s5.value == doctest::Approx(0.027377384267727904).epsilon(1e-7));
  CHECK(s5.r_star == doctest::Approx(4.3567874133328947).epsilon(1e-4));

  // Inside the support the sup is the r → 0 limit, |f(x)| = 1.
  CHECK(maximal_value(char_fn(1.0), ph, 0.5).value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("zero phase on an indicator: closed-form maximizer") {
  for (double x : {2.0, 3.0, 10.0, -7.5}) {
    const auto s = maximal_value(char_fn(1.0), Phase::zero(), x);
    CHECK(s.value == doctest::Approx(1.0 / (std::abs(x) + 1.0)).epsilon(1e-9));
    CHECK(s.r_star == doctest::Approx(std::abs(x) + 1.0).epsilon(1e-6));
  }
}

TEST_CASE("pointwise lower bound for the atom") {
  const auto s = maximal_value(atom_fbeta(1e-3), Phase::laurent_monomial(3), 2.0);
  CHECK(s.value >= 1.0 / 16.0 - s.err);
}

TEST_CASE("property: zero phase matches the exact step maximal function") {
  Rng rng(101);
  for (int i = 0; i < 40; ++i) {
    const PiecewiseConstantFn f = oscimax::testing::random_step(rng, i % 2 == 0);
    for (int j = 0; j < 10; ++j) {
      const double x = rng.uniform(-8.0, 8.0);
      const auto s = maximal_value(f, Phase::zero(), x);
      const double exact = zero_phase_maximal_exact(f, x);
      CHECK(std::abs(s.value - exact) <= std::max(s.err, 1e-6));
      const double M = hl_maximal_exact(f, x);
      CHECK(s.value <= M + s.err + 1e-12 * std::max(1.0, M));
    }
  }
}

TEST_CASE("property: r_half ≤ r_star and the half-level is reached there") {
  Rng rng(77);
  const Phase ph = parse_phase("curved:|t|^2.5");
  SearchConfig cfg;
  for (int i = 0; i < 20; ++i) {
    const auto b = oscimax::testing::random_bump(rng);
    const double x = rng.uniform(-10.0, 10.0);
    const auto s = maximal_value(b, ph, x, cfg);
    CHECK(s.r_half <= s.r_star * (1.0 + 1e-9));
    if (s.value > 0.0) {
      const auto a = average(b, ph, x, s.r_half, 1e-12);
      CHECK(std::abs(a.value) >= cfg.half_factor * s.value - s.err - a.abs_error_estimate - 1e-9);
    }
  }
}

TEST_CASE("case classification") {
  MaximalSample s;
  s.x = 10.0;
  s.value = 1e-3;  // below 10^{-1.5}
  s.r_half = 3.0;
  CHECK(classify_case(s, 2.0, 0.5).label == CaseLabel::A2);
  s.value = 0.5;
  CHECK(classify_case(s, 2.0, 0.5).label == CaseLabel::A3);
  s.r_half = 25.0;
  CHECK(classify_case(s, 2.0, 0.5).label == CaseLabel::A4_1);
  s.r_half = 12.0;
  CHECK(classify_case(s, 2.0, 0.5).label == CaseLabel::A4_2);
  s.r_half = 5.0;
  CHECK(classify_case(s, 2.0, 0.5).boundary_tie);
  s.x = 1.5;
  CHECK(classify_case(s, 2.0, 0.5).label == CaseLabel::A1);
  CHECK_THROWS_AS(classify_case(s, 2.0, 1.0), PreconditionError);
}

TEST_CASE("M_cut selection") {
  CHECK(auto_m_cut(Phase::quadratic(Coefficient(1.0))) == 2.0);
  CHECK(auto_m_cut(Phase::laurent_monomial(3)) == 2.0);
  // 2.5 M^1.5 ≥ 2·2·10 M ⇒ M ≥ 256
  const Phase ph = Phase::curved({Coefficient(10.0), Coefficient(1.0)}, {2.0, 2.5});
  CHECK(auto_m_cut(ph) == doctest::Approx(256.0).epsilon(1e-6));
  SearchConfig cfg;
  cfg.m_cut = 5.0;
  CHECK(resolve_m_cut(ph, cfg) == 5.0);
}

TEST_CASE("search config validation") {
  SearchConfig c;
  c.epsilon = 1.5;
  CHECK_THROWS(c.validate());
  SearchConfig d;
  const auto round = SearchConfig::from_json(d.to_json());
  CHECK(round.points_per_decade == d.points_per_decade);
}
