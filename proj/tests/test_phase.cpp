#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oscimax/error.hpp"
#include "oscimax/phase.hpp"

using namespace oscimax;
using oscimax::testing::Rng;

TEST_CASE("binomial coefficients, mpmath reference") {
  CHECK(binomial(2.5, 3) == doctest::Approx(0.3125).epsilon(1e-15));
  CHECK(binomial(2.5, 4) == doctest::Approx(-0.0390625).epsilon(1e-15));
  CHECK(binomial(3.7, 6) == doctest::Approx(0.0064393874999999983).epsilon(1e-13));
  CHECK(binomial(5.0, 6) == 0.0);
  CHECK(binomial(4.0, 2) == 6.0);
}

TEST_CASE("series tail bound dominates the summed tail") {
  struct Ref {
    double k;
    int L;
    double tail;
  };
  // Σ_{l≥L} l|C(k,l)| from mpmath nsum
  const Ref refs[] = {{2.5, 5, 0.15624960603059847},   {2.5, 10, 0.032729713747361808},
                      {2.5, 20, 0.0094325361064533719}, {2.5, 60, 0.0016068044941485168},
                      {3.7, 5, 0.22014999997973715},   {3.7, 10, 0.0073667998231265047},
                      {3.7, 20, 0.0006860925456602083}, {3.7, 60, 2.6546038503094627e-5}};
  for (const auto& r : refs) {
    CAPTURE(r.k);
    CAPTURE(r.L);
    CHECK(binom_series_tail(r.k, r.L) >= r.tail);
  }
  // Integer k: the series terminates.
  CHECK(binom_series_tail(2.0, 4) == 0.0);
  CHECK(binom_series_tail(5.0, 7) == 0.0);
  // C_k/(L − ⌊k⌋) by hand: k = 2.5, C = 2.5·1.5·0.5
  CHECK(binom_series_tail(2.5, 5) == doctest::Approx(1.875 / 3.0));
  CHECK_THROWS_AS(binom_series_tail(2.5, 3), PreconditionError);
}

TEST_CASE("phase evaluation by family") {
  const Phase lau = Phase::laurent(2, {Coefficient(1.0), Coefficient(0.0), Coefficient(0.0), Coefficient(0.0),
                                       Coefficient(3.0)});  // t^-2 + 3t^2
  CHECK(eval_phase(lau, 0.0, 2.0) == doctest::Approx(0.25 + 12.0));
  CHECK(phase_dt(lau, 0.0, 2.0) == doctest::Approx(-2.0 / 8.0 + 12.0));
  CHECK_THROWS_AS(eval_phase(lau, 0.0, 0.0), DomainError);

  const Phase cur = Phase::curved({Coefficient(2.0), Coefficient(1.0)}, {2.0, 2.5});
  CHECK(eval_phase(cur, 0.0, -3.0) == doctest::Approx(18.0 + std::pow(3.0, 2.5)));

  const Phase quad = Phase::quadratic(Coefficient([](double x) { return 2.0 + std::sin(x); }, 3.0, 1.0, "2+sin x"));
  CHECK(eval_phase(quad, 1.0, 2.0) == doctest::Approx(4.0 * (2.0 + std::sin(1.0))));

  CHECK(eval_phase(Phase::zero(), 3.0, 4.0) == 0.0);
  CHECK(Phase::laurent_monomial(3).x_independent());
  CHECK_FALSE(quad.x_independent());
}

TEST_CASE("coefficient bounds are enforced at evaluation") {
  const Coefficient c([](double x) { return 2.0 * x; }, 1.0, std::nullopt, "2x");
  CHECK(c(0.25) == 0.5);
  CHECK_THROWS_AS(c(1.0), PreconditionError);
  CHECK_THROWS_AS(Phase::quadratic(Coefficient([](double) { return 1.0; }, 1.0)), PreconditionError);
}

TEST_CASE("property: ∂γ/∂t matches a central difference") {
  Rng rng(11);
  const Phase phases[] = {Phase::laurent_monomial(3), Phase::laurent_monomial(-1, 0.5),
                          Phase::curved({Coefficient(1.0), Coefficient(0.3)}, {2.0, 3.5})};
  for (const auto& ph : phases) {
    for (int i = 0; i < 200; ++i) {
      const double u = rng.uniform(0.2, 4.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      const double h = 1e-6 * std::max(1.0, std::abs(u));
      const double fd = (eval_phase(ph, 0.0, u + h) - eval_phase(ph, 0.0, u - h)) / (2.0 * h);
      CHECK(phase_dt(ph, 0.0, u) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("property: binomial expansion of the curved phase") {
  // γ(x, x−t) minus its affine part in t equals the l ≥ 2 expansion, to
  // within the reported tail bound.
  Rng rng(5);
  const Phase ph = Phase::curved({Coefficient(1.0), Coefficient(0.5)}, {2.5, 3.0});
  for (int i = 0; i < 300; ++i) {
    const double x = rng.uniform(2.0, 30.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    const double t = rng.uniform(-0.5, 0.5) * std::abs(x);
    const AmplitudePhase ap = modified_amplitude_phase(ph, x, t, 40);
    const double ax = std::abs(x), s = x > 0 ? -1.0 : 1.0;
    double affine = 0.0;
    for (auto [c, d] : {std::pair{1.0, 2.5}, std::pair{0.5, 3.0}}) {
      affine += c * (std::pow(ax, d) + s * d * std::pow(ax, d - 1.0) * t);
    }
    const double exact = eval_phase(ph, x, x - t) - affine;
    CHECK(std::abs(exact - ap.value) <= ap.tail_bound + 1e-9 * std::pow(ax, 3.0));
  }
}

TEST_CASE("default truncation follows the stated formula") {
  CHECK(default_truncation(2.5, 10.0, 1.0, 1e-12) == 2 + 2 + 12);
}
