#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscimax/maximal.hpp"
#include "oscimax/testfns.hpp"

namespace oscimax {

// ∫ (1 + |x|^l) |f(x)| dx. Exact for step functions (per-piece antiderivative
// of |x|^l); Gauss–Kronrod for bumps.
double weighted_l1(const Function& f, double l);

// ∫ |f| log(e + |f|).
double llogl_norm(const Function& f);

// ‖f‖_q, q ∈ [1, ∞].
double lp_norm(const Function& f, double q);

// ‖f'‖_p; empty for step functions, whose derivative is a sum of point masses.
std::optional<double> derivative_lp(const Function& f, double p);

// ‖(1+|x|^l) f‖₁ + ‖f'‖_p; empty when the derivative term is undefined.
std::optional<double> cpl_norm(const Function& f, double p, double l);

struct NormReport {
  double p = 2.0;
  double l = 1.0;
  double l1 = 0.0;
  double weighted_l1 = 0.0;
  std::optional<double> lp_derivative;
  double llogl = 0.0;
  std::optional<double> cpl;
  std::string weighted_method;  // "exact" | "quadrature"
  std::string llogl_method;

  nlohmann::json to_json() const;
};

NormReport norm_report(const Function& f, double p, double l);

// Exact centred Hardy–Littlewood maximal function of a step function:
// sup_r (1/2r) ∫_{x−r}^{x+r} |f|, attained at a radius where x ± r meets a
// breakpoint or in the limit r → 0.
double hl_maximal_exact(const PiecewiseConstantFn& f, double x);

// sup_r |(1/2r) ∫_{x−r}^{x+r} f|, the zero-phase maximal function without the
// absolute value inside; same candidate radii.
double zero_phase_maximal_exact(const PiecewiseConstantFn& f, double x);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;

  nlohmann::json to_json() const;
};

// ‖f‖_q ≤ 2 ‖f‖_{C_{p,0}} with ‖f‖_{C_{p,0}} = 2‖f‖₁ + ‖f'‖_p.
InequalityCheck check_embedding_q(const SmoothTestFn& f, double p, double q, double tol = 1e-12);

struct LloglCheck {
  double lhs = 0.0;       // ∫_S Mf
  double rhs = 0.0;       // |S| + C_test · ∫|f| log(e+|f|)
  bool pass = false;
  double minimal_constant = 0.0;  // smallest C that would pass
  double abs_error = 0.0;

  nlohmann::json to_json() const;
};

// ∫_S Mf ≤ |S| + C ∫|f| log(e+|f|) on S = [s_lo, s_hi].
LloglCheck check_llogl_lemma(const Function& f, double s_lo, double s_hi, double C_test);

struct Weight {
  std::function<double(double)> fn;
  std::string label;
};

// ψ_m(x) = 1 + |x| (log|x|)^m for |x| ≥ 1, 1 otherwise.
Weight psi_weight(double m);
// 1 + |x|^e.
Weight power_weight(double e);
Weight expression_weight(const std::string& text);
// psi:m, power:e, or an expression in x.
Weight parse_weight(const std::string& spec);

struct WeightGrid {
  double x_min = 1e-3;
  double x_max = 1e6;
  int points_per_decade = 50;
  // Tail blocks must decay at least like n^{-tail_exponent_min} (n the dyadic
  // block index) or geometrically.
  double tail_exponent_min = 1.5;
};

struct WeightReport {
  std::string label;
  double lower_ratio_min = 0.0;  // min φ(x)/(1+|x|)
  double lower_ratio_witness = 0.0;
  // ratio at the grid end over the ratio two decades earlier (worse side);
  // a lower bound c(1+|x|) needs this to stay near or above 1.
  double lower_trend = 0.0;
  bool lower_pass = false;

  double doubling_max = 0.0;  // max φ(2x)/φ(x)
  double doubling_witness = 0.0;
  double doubling_last_decade = 0.0;
  double doubling_prev_decade = 0.0;
  bool doubling_pass = false;

  std::vector<double> tail_blocks;        // ∫ over ±[2^n, 2^{n+1}] of 1/φ
  std::vector<double> tail_partial_sums;
  double tail_exponent = 0.0;             // fitted s in block_n ~ n^{-s}
  double tail_geometric_ratio = 0.0;      // mean block_{n+1}/block_n over the fit window
  bool tail_pass = false;

  bool all_pass() const { return lower_pass && doubling_pass && tail_pass; }
  nlohmann::json to_json() const;
};

WeightReport weight_admissibility(const Weight& phi, double R_probe, const WeightGrid& grid = {});

}  // namespace oscimax
