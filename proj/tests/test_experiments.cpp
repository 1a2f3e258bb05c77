#include <doctest.h>

#include <cmath>

#include "oscimax/config.hpp"
#include "oscimax/error.hpp"
#include "oscimax/experiments.hpp"

using namespace oscimax;

namespace {

const ReportRow* find_row(const ExperimentReport& rep, std::size_t col, double value) {
  for (const auto& r : rep.rows) {
    if (const auto* v = std::get_if<double>(&r.params[col]); v && *v == value) return &r;
  }
  return nullptr;
}

const Check* find_check(const ExperimentReport& rep, const std::string& name) {
  for (const auto& c : rep.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("log-β window constants") {
  const Phase ph = Phase::laurent_monomial(3);
  CHECK(laurent_growth_constant(ph) == 6.0);
  CHECK(logbeta_window_end(6.0, 3, 1e-3) == doctest::Approx(9.1287092917527686).epsilon(1e-14));
}

TEST_CASE("log-β growth on three β") {
  LogBetaParams p;
  p.betas = {1e-1, 1e-2, 1e-4};
  p.samples = 6;
  const auto rep = exp_logbeta_growth(Phase::laurent_monomial(3), p, {});
  CHECK_FALSE(rep.has_failures());
  // Only two usable β: the line fit cannot decide.
  REQUIRE(find_check(rep, "log_growth_r2"));
  CHECK(find_check(rep, "log_growth_r2")->verdict == Verdict::inconclusive);
  // β = 0.1 gives X = (1/1.2)^{1/2} < 1.1: the window is empty.
  bool skipped = false;
  for (const auto& r : rep.rows) skipped = skipped || r.flag == "empty_window";
  CHECK(skipped);
  const auto* inc = find_check(rep, "window_integral_increasing");
  REQUIRE(inc);
  CHECK(inc->verdict == Verdict::pass);

  LogBetaParams bad;
  bad.betas = {1e-3, 1e-2};
  CHECK_THROWS_AS(exp_logbeta_growth(Phase::laurent_monomial(3), bad, {}), ConfigError);
  bad.betas = {1e-6};
  CHECK_THROWS_AS(exp_logbeta_growth(Phase::laurent_monomial(3), bad, {}), ConfigError);
}

TEST_CASE("decay remark rows") {
  DecayParams p;
  p.k = 2.0;
  p.beta = 0.5;
  p.xs = {0.25, 2.0, 10.0, 40.0};
  const auto rep = exp_decay_remark(p, {});
  const auto* r10 = find_row(rep, 0, 10.0);
  REQUIRE(r10);
  CHECK(*r10->bound == doctest::Approx(0.011080332409972299).epsilon(1e-14));
  CHECK(r10->verdict == Verdict::pass);
  const auto* r0 = find_row(rep, 0, 0.25);
  REQUIRE(r0);
  CHECK(r0->verdict == Verdict::skipped);
  CHECK(r0->flag == "x<=beta");
  CHECK_FALSE(rep.has_failures());

  // ∫ 1/|xγ'(x)| diverges for k ≤ 1.
  CHECK_THROWS_AS(decay_phase(1.0, true), ConfigError);
  CHECK_NOTHROW(decay_phase(1.5, true));
  CHECK_THROWS_AS(decay_phase(2.5, false), ConfigError);
}

TEST_CASE("counterexample comparators") {
  CHECK(divergent_comparator(10) == doctest::Approx(2.7064173074544722).epsilon(1e-14));
  CHECK(separable_delta(default_counterexample_phase(CounterexampleSpec::Variant::part1)) ==
        doctest::Approx(0.3162).epsilon(1e-12));
}

TEST_CASE("counterexample part 2 windows") {
  CounterexampleParams p;
  p.variant = CounterexampleSpec::Variant::part2;
  p.K = 1;
  p.window_nodes = 8;
  const auto rep = exp_counterexample_divergence(p, {});
  REQUIRE(rep.rows.size() == 1);
  // Single window starting at 4 + 1 + β₁; the measured mass clears β₁·(1/8)·log(X/(1+β₁)).
  CHECK(rep.rows[0].verdict == Verdict::pass);
  CHECK(std::get<double>(rep.rows[0].params[1]) == 4.0);
  CHECK_FALSE(rep.has_failures());

  p.K = 5;
  CHECK_THROWS_AS(exp_counterexample_divergence(p, {}), ConfigError);
}

TEST_CASE("Case-4 tail envelope constants") {
  const auto env = tail_envelope(Phase::quadratic(Coefficient(1.0)), {});
  CHECK(env.d_m == 2.0);
  CHECK(env.mu == 1.0);
  CHECK(env.A == 2.0);
  // d_m − 1/p' = 2 − 1/2 > 1: integrable; the envelope integral falls with X.
  CHECK(std::isfinite(env.tail_integral(20.0, 1.0, 1.0, 2.0, 0.5)));
  CHECK(env.tail_integral(40.0, 1.0, 1.0, 2.0, 0.5) < env.tail_integral(20.0, 1.0, 1.0, 2.0, 0.5));
  // Σ_{l≥2} l|C(2,l)| = 2
  CHECK(binomial_weight_sum(2.0) == doctest::Approx(2.0));
  CHECK(binomial_weight_sum(2.5) > binomial_weight_sum(2.0));
  CHECK_THROWS(tail_envelope(Phase::laurent_monomial(3), {}));
}

TEST_CASE("positive bound: trivial rows and translation invariance of ∫M_γf") {
  PositiveBoundParams p;
  p.corpus = {smooth_bump(0, 1, 0), smooth_bump(0, 1, 1), smooth_bump(5, 1, 1)};
  const auto rep = exp_positive_bound(Phase::quadratic(Coefficient(1.0)), p, {});
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].flag == "trivial");
  const double i0 = std::get<double>(rep.rows[1].params[5]);
  const double i5 = std::get<double>(rep.rows[2].params[5]);
  // M_γ commutes with translations for this x-independent phase.
  CHECK(std::abs(i0 - i5) <= 0.01 * i0);
  CHECK(std::isfinite(rep.rows[1].measured));
  CHECK(rep.rows[2].measured < rep.rows[1].measured);  // ‖f‖_{C_{p,l}} grows with the shift
  CHECK_FALSE(rep.has_failures());
}

TEST_CASE("case census, zero phase indicator") {
  CensusParams p;
  for (int i = -40; i <= 40; ++i) p.x_grid.push_back(0.25 * i);
  const auto rep = exp_case_census(char_fn(1.0), Phase::zero(), p, {});
  // Maximizer r = |x| + 1 > |x|/2: every |x| > M_cut lands in A4.
  for (const auto& r : rep.rows) {
    const double x = std::get<double>(r.params[0]);
    const std::string label = std::get<std::string>(r.params[1]);
    if (std::abs(x) > 2.0) CHECK(label.rfind("A4", 0) == 0);
    if (std::abs(x) <= 2.0) CHECK(label == "A1");
  }
  const auto* part = find_check(rep, "partition_measure");
  REQUIRE(part);
  CHECK(part->measured == doctest::Approx(20.0));
  CHECK_FALSE(rep.has_failures());
}

TEST_CASE("reports are identical across worker counts") {
  DecayParams p;
  p.xs = {2.0, 3.0, 5.0, 8.0, 13.0, 21.0};
  ExperimentOptions one, four;
  four.workers = 4;
  CHECK(exp_decay_remark(p, one).to_csv() == exp_decay_remark(p, four).to_csv());
  const auto corpus = bump_corpus(5, 42);
  const auto again = bump_corpus(5, 42);
  for (std::size_t i = 0; i < corpus.size(); ++i) CHECK(corpus[i].center() == again[i].center());
}
