#pragma once

#include <complex>
#include <numbers>

#include <json.hpp>

#include "oscimax/phase.hpp"
#include "oscimax/testfns.hpp"

namespace oscimax {

enum class QuadMethod { adaptive, ibp_accelerated, exact_piecewise };

const char* to_string(QuadMethod m);

struct QuadResult {
  std::complex<double> value{};
  double abs_error_estimate = 0.0;
  int panels_used = 0;
  QuadMethod method = QuadMethod::exact_piecewise;
  bool converged = true;  // false: tolerance not met, estimate is the honest larger one

  nlohmann::json to_json() const;
};

struct QuadOptions {
  int max_depth = 40;
  bool allow_ibp = true;
  // Largest phase change allowed across one G7/K15 panel.
  double phase_budget = std::numbers::pi / 2.0;
  long max_panels = 4'000'000;
};

// ∫_a^b f(t) e^{iγ(x, x−t)} dt to absolute tolerance tol.
QuadResult osc_integral(const Function& f, const Phase& phase, double x, double a, double b, double tol,
                        const QuadOptions& opts = {});

// Same with the phase already frozen at x (inner loops of the radius search).
QuadResult osc_integral(const Function& f, const PhaseAtX& phase, double x, double a, double b, double tol,
                        const QuadOptions& opts = {});

// (1/2r) ∫_{x−r}^{x+r} f(t) e^{iγ(x, x−t)} dt, tolerance tol on the average.
QuadResult average(const Function& f, const Phase& phase, double x, double r, double tol,
                   const QuadOptions& opts = {});

// 4 / min(|γ'(a)|, |γ'(b)|), a bound for |∫_a^b e^{iγ(t)} dt| when |γ'| is
// positive and monotone on [a,b]. The phase must not depend on x.
double ibp_tail_bound(const Phase& phase, double a, double b);

}  // namespace oscimax
