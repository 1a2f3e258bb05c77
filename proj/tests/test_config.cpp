#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oscimax/config.hpp"
#include "oscimax/error.hpp"
#include "oscimax/expr.hpp"

using namespace oscimax;

TEST_CASE("expressions and exact derivatives") {
  const Expr e = Expr::parse("2*sin(x)^2 + exp(-x)/3 - |x|", 'x');
  const double x = 0.7;
  CHECK(e(x) == doctest::Approx(2 * std::sin(x) * std::sin(x) + std::exp(-x) / 3 - x));
  CHECK(e.eval_dual(x).deriv == doctest::Approx(4 * std::sin(x) * std::cos(x) - std::exp(-x) / 3 - 1));
  CHECK(Expr::parse("pi*e", 't').is_constant());
  CHECK_FALSE(Expr::parse("t^2", 't').is_constant());
  CHECK(Expr::parse("clamp(t, -1, 1)", 't')(3.0) == 1.0);
  CHECK_THROWS(Expr::parse("sin(", 'x'));
  CHECK_THROWS(Expr::parse("y+1", 'x'));
}

TEST_CASE("inline phase specs") {
  const Phase a = parse_phase("laurent:0.01*t^2-t^-1");
  CHECK(a.family() == PhaseFamily::laurent);
  CHECK(eval_phase(a, 0.0, 2.0) == doctest::Approx(0.04 - 0.5));

  const Phase b = parse_phase("curved:2*|t|^2+|t|^3");
  CHECK(eval_phase(b, 0.0, -2.0) == doctest::Approx(16.0));

  const Phase c = parse_phase("quadratic:1.5");
  CHECK(eval_phase(c, 9.0, 2.0) == doctest::Approx(6.0));

  const Phase d = parse_phase("separable:cos(x);t^2;1");
  CHECK(eval_phase(d, 1.0, 3.0) == doctest::Approx(std::cos(1.0) * 9.0));

  CHECK(parse_phase("zero").family() == PhaseFamily::zero);
  CHECK(parse_phase("laurent:1e-2*t^2").family() == PhaseFamily::laurent);
}

TEST_CASE("JSON phase specs, inline and from a file") {
  const Phase p = parse_phase(R"j({"family":"laurent","exponents":[3,-1],"coeffs":[1,{"expr":"cos(x)","sup":1}]})j");
  CHECK(eval_phase(p, 0.0, 2.0) == doctest::Approx(8.0 + 0.5));

  const std::string path = "oscimax_test_phase.json";
  {
    std::ofstream os(path);
    os << R"({"family":"curved","exponents":[2.5],"coeffs":[2]})";
  }
  CHECK(eval_phase(parse_phase(path), 0.0, 4.0) == doctest::Approx(64.0));
  std::remove(path.c_str());
}

TEST_CASE("malformed specs are ConfigErrors") {
  CHECK_THROWS_AS(parse_phase("bogus:1"), ConfigError);
  CHECK_THROWS_AS(parse_phase("laurent:t^1.5"), ConfigError);
  CHECK_THROWS_AS(parse_phase("laurent:"), ConfigError);
  CHECK_THROWS_AS(parse_phase("curved:t^2"), ConfigError);
  CHECK_THROWS_AS(parse_phase("separable:cos(x);t^2"), ConfigError);
  CHECK_THROWS_AS(parse_phase("{\"family\":\"quadratic\",\"a\":{\"expr\":\"x\",\"sup\":1}}"), ConfigError);
  CHECK_THROWS_AS(parse_phase("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_function("atom:-1"), ConfigError);
  CHECK_THROWS_AS(parse_function("step:0,1;1,2"), ConfigError);
  CHECK_THROWS_AS(parse_function("wave:1"), ConfigError);
  CHECK_THROWS_AS(parse_function("counterexample1:2.5"), ConfigError);
  CHECK_THROWS_AS(parse_real_list("1,,2"), ConfigError);
}

TEST_CASE("function specs") {
  const Function a = parse_function("atom:0.25");
  CHECK(eval(a, -0.1) == -2.0);
  CHECK(eval(a, 0.1) == 2.0);
  const Function s = parse_function("step:-1,0,2;1,-3");
  CHECK(l1_norm(s) == 7.0);
  const Function b = parse_function("bump:1,2,3");
  CHECK(eval(b, 1.0) == 3.0);
  const Function j = parse_function(R"({"type":"bump","center":0,"scale":1})");
  CHECK(eval(j, 0.0) == 1.0);
  CHECK(std::get<PiecewiseConstantFn>(parse_function("counterexample2:2")).breakpoints().size() == 6);
  CHECK(parse_real_list("1e-2, 3e-3 ,1") == std::vector<double>{1e-2, 3e-3, 1.0});
}
