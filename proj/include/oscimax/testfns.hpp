#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace oscimax {

// Step function: values[i] on (breakpoints[i], breakpoints[i+1]), zero
// outside [breakpoints.front(), breakpoints.back()].
class PiecewiseConstantFn {
 public:
  PiecewiseConstantFn() = default;
  PiecewiseConstantFn(std::vector<double> breakpoints, std::vector<double> values);

  const std::vector<double>& breakpoints() const { return b_; }
  const std::vector<double>& values() const { return v_; }
  bool empty() const { return v_.empty(); }

  double operator()(double x) const;

  double l1() const { return abs_prefix_.empty() ? 0.0 : abs_prefix_.back(); }
  double sup() const;
  double support_radius() const;
  double support_lo() const { return b_.empty() ? 0.0 : b_.front(); }
  double support_hi() const { return b_.empty() ? 0.0 : b_.back(); }

  // ∫_{b_0}^{x} f and ∫_{b_0}^{x} |f|; piecewise linear in x.
  double cumulative(double x) const;
  double abs_cumulative(double x) const;

  // Summed piece by piece; prefix differences lose digits on short windows.
  double integral(double a, double b) const { return window_sum(a, b, false); }
  double abs_integral(double a, double b) const { return window_sum(a, b, true); }

  // sup |f| over [a,b] (0 if the interval misses the support).
  double local_sup(double a, double b) const;

  PiecewiseConstantFn translated(double shift) const;
  PiecewiseConstantFn scaled(double factor) const;
  PiecewiseConstantFn sum(const PiecewiseConstantFn& other) const;

  nlohmann::json to_json() const;

 private:
  std::size_t piece_index(double x) const;  // index i with b_i <= x < b_{i+1}
  double window_sum(double a, double b, bool absolute) const;

  std::vector<double> b_;
  std::vector<double> v_;
  std::vector<double> prefix_;      // ∫ f up to b_i
  std::vector<double> abs_prefix_;  // ∫ |f| up to b_i
};

// h·(1 − u²)² for |u| ≤ 1, u = (x − c)/s; C¹ with compact support.
class SmoothTestFn {
 public:
  SmoothTestFn(double center, double scale, double height);

  double center() const { return c_; }
  double scale() const { return s_; }
  double height() const { return h_; }

  double operator()(double x) const;
  double derivative(double x) const;
  // ∫_{c−s}^{x} f.
  double antiderivative(double x) const;

  double integral(double a, double b) const { return antiderivative(b) - antiderivative(a); }
  double abs_integral(double a, double b) const;
  double local_sup(double a, double b) const;
  // sup |f'| over [a,b].
  double local_derivative_sup(double a, double b) const;

  double support_lo() const { return c_ - s_; }
  double support_hi() const { return c_ + s_; }
  double support_radius() const;

  double sup() const;
  double l1() const;
  // ‖f‖_q for q ∈ [1, ∞] (q = ∞ given as HUGE_VAL).
  double lq_norm(double q) const;
  // ‖f'‖_p for p ∈ [1, ∞].
  double derivative_lp(double p) const;
  // ∫ |x|^l |f(x)| dx; Gauss–Kronrod on pieces split at 0, exact for
  // integer l ≤ 18, adaptive otherwise.
  double moment(double l) const;

  nlohmann::json to_json() const;

 private:
  double c_, s_, h_;
};

using Function = std::variant<PiecewiseConstantFn, SmoothTestFn>;

double eval(const Function& f, double x);
double l1_norm(const Function& f);
double sup_norm(const Function& f);
double support_radius(const Function& f);
double support_lo(const Function& f);
double support_hi(const Function& f);
double abs_integral(const Function& f, double a, double b);
double local_sup(const Function& f, double a, double b);
// sup |f'| over [a,b]; 0 for step functions (only meaningful between breakpoints).
double local_derivative_sup(const Function& f, double a, double b);
// Breakpoints / support edges of f (kinks where the integrand is not smooth).
std::vector<double> structural_points(const Function& f);
nlohmann::json to_json(const Function& f);
Function function_from_json(const nlohmann::json& j);

PiecewiseConstantFn atom_fbeta(double beta);
PiecewiseConstantFn char_fn(double beta);
SmoothTestFn smooth_bump(double center, double scale, double height);

struct CounterexampleTerm {
  int index = 0;
  double scale = 0.0;        // n_k (part 1) or β_n (part 2)
  double center = 0.0;       // k² or 2^{2^n}
  double coefficient = 0.0;  // multiplier in front of the atom
  double support_lo = 0.0;
  double support_hi = 0.0;
  double h1_weight = 0.0;    // 1/(k log²(k+1))
};

struct CounterexampleSpec {
  enum class Variant { part1, part2 } variant = Variant::part1;
  int K = 0;
  std::vector<CounterexampleTerm> terms;
  double h1_bound = 0.0;       // Σ_{k≤K} 1/(k log²(k+1))
  double h1_total_bound = 0.0; // partial sum through k = 10 plus 1/log 10 (bounds the full series)
  std::vector<std::pair<int, int>> overlaps;  // term indices whose supports intersect

  nlohmann::json to_json() const;
};

// Σ_{k≤K} h_k(x − k²), h_k = (2/(k log²(k+1)))·f_{k log²(k+1)}.
std::pair<PiecewiseConstantFn, CounterexampleSpec> counterexample_part1(int K);

// Σ_{n≤N} β_n f_{β_n}(x − 2^{2^n}), β_n = 1/(n log²(n+1)); N ≤ 4.
std::pair<PiecewiseConstantFn, CounterexampleSpec> counterexample_part2(int N);

// Upper bound for Σ_{k≥1} 1/(k log²(k+1)): exact partial sum through k = 10
// plus the integral tail ∫_{10}^∞ dt/(t log² t) = 1/log 10.
double h1_series_bound();

}  // namespace oscimax
