#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace oscimax {

// A bounded coefficient function c(x) with its sup norm stated up front.
// The bound is never inferred by sampling; every evaluation is checked
// against it and a violation is a PreconditionError.
class Coefficient {
 public:
  Coefficient() : Coefficient(0.0) {}
  // Constant coefficient: ‖c‖∞ = |c|, ‖1/c‖∞ = 1/|c| when c ≠ 0.
  Coefficient(double c);  // NOLINT(google-explicit-constructor)
  Coefficient(std::function<double(double)> fn, double sup_bound,
              std::optional<double> inv_sup_bound = std::nullopt, std::string label = {});

  double operator()(double x) const;

  double sup_bound() const { return sup_; }
  std::optional<double> inv_sup_bound() const { return inv_sup_; }
  bool is_constant() const { return !fn_; }
  bool is_zero() const { return !fn_ && value_ == 0.0; }
  const std::string& label() const { return label_; }

 private:
  std::function<double(double)> fn_;
  double value_ = 0.0;
  double sup_ = 0.0;
  std::optional<double> inv_sup_;
  std::string label_;
};

// β(t) of a separable phase, with its derivative supplied analytically.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;  // may be empty
  // |β'| is monotone on each half-line and 1/β' is monotone there (single power laws).
  bool single_power = false;
  std::string label;

  // β(t) = t^k (integer k, signed) or |t|^k.
  static ScalarFunction power(double k, bool absolute);
  static ScalarFunction from_expression(const std::string& text);
};

struct SeparablePhase {
  Coefficient alpha;
  ScalarFunction beta;
};

// γ(x,t) = Σ_{j=-d}^{d} c_j(x) t^j; coeffs[j + degree].
struct LaurentPhase {
  int degree = 0;
  std::vector<Coefficient> coeffs;

  const Coefficient& coeff(int j) const { return coeffs[static_cast<std::size_t>(j + degree)]; }
  bool has_negative_powers() const;
};

// γ(x,t) = Σ_j c_j(x) |t|^{d_j}, exponents strictly increasing.
struct CurvedPowerSum {
  std::vector<Coefficient> coeffs;
  std::vector<double> exponents;
};

// γ(x,t) = a(x) t².
struct QuadraticPhase {
  Coefficient a;
};

struct ZeroPhase {};

enum class PhaseFamily { separable, laurent, curved, quadratic, zero };

const char* to_string(PhaseFamily f);

// γ frozen at a fixed x: every coefficient already evaluated. This is what
// the quadrature inner loops call.
class PhaseAtX {
 public:
  double value(double u) const;
  double dt(double u) const;
  double dtt(double u) const;
  // Upper bound for |∂γ/∂t| over u in [u1, u2] (an interval not containing 0
  // when the phase is singular there). Exact term-wise bound for the
  // polynomial and power families; sampled for separable phases.
  double dt_abs_bound(double u1, double u2) const;

  // Phase undefined at u = 0 (negative Laurent powers).
  bool singular_at_zero() const { return singular_at_zero_; }
  // Phase is not smooth at u = 0 (|u|^d with non-integer d, or a user β).
  bool kink_at_zero() const { return kink_at_zero_; }
  // 1/γ' is monotone on each half-line (single power law); used by the
  // integration-by-parts path.
  bool single_power() const { return single_power_; }
  bool is_zero() const { return family_ == PhaseFamily::zero; }

 private:
  friend class Phase;

  PhaseFamily family_ = PhaseFamily::zero;
  std::vector<double> c_;     // Laurent: index j + degree; curved: per term
  std::vector<double> d_;     // curved exponents
  int degree_ = 0;
  double scale_ = 0.0;        // quadratic a(x) or separable α(x)
  const ScalarFunction* beta_ = nullptr;
  bool singular_at_zero_ = false;
  bool kink_at_zero_ = false;
  bool single_power_ = false;
};

class Phase {
 public:
  using Variant = std::variant<SeparablePhase, LaurentPhase, CurvedPowerSum, QuadraticPhase, ZeroPhase>;

  Phase() : v_(ZeroPhase{}) {}

  static Phase zero();
  static Phase laurent(int degree, std::vector<Coefficient> coeffs);
  // c·t^power with every other coefficient zero; degree = |power|.
  static Phase laurent_monomial(int power, double c = 1.0);
  static Phase curved(std::vector<Coefficient> coeffs, std::vector<double> exponents);
  static Phase quadratic(Coefficient a);
  static Phase separable(Coefficient alpha, ScalarFunction beta);

  PhaseFamily family() const;
  bool x_independent() const;
  const Variant& variant() const { return v_; }

  PhaseAtX at(double x) const;

  nlohmann::json to_json() const;

 private:
  explicit Phase(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// γ(x,t).
double eval_phase(const Phase& phase, double x, double t);

// ∂γ/∂t at (x,u).
double phase_dt(const Phase& phase, double x, double u);

// c·x_hi^{d-1} with c = 2d·max_j ‖c_j‖∞; dominates |∂_uγ(x,u)| for
// 1 ≤ x_lo − beta ≤ u ≤ x_hi. Laurent phases of degree ≥ 2 only.
double derivative_sup_bound(const Phase& phase, double x_lo, double x_hi, double beta);

// Generalized binomial coefficient C(k, l).
double binomial(double k, int l);

// Upper bound for Σ_{l≥L} l·|C(k,l)|, namely C_k/(L − ⌊k⌋) with
// C_k = k(k−1)…(k−⌊k⌋). Requires k ≥ 2 and L ≥ ⌊k⌋+2.
double binom_series_tail(double k, int L);

struct AmplitudePhase {
  double value = 0.0;       // Σ_j c_j(x) Σ_{l=2}^{L} C(d_j,l)(±t)^l |x|^{d_j−l}
  double tail_bound = 0.0;  // bound on the omitted l > L terms
  int truncation = 0;       // L actually used
};

// Nonlinear part of the binomial expansion of γ(x, x−t) around |x| for the
// curved-power (or quadratic) family; sign − for x > 0 and + for x < 0.
// Requires x ≠ 0 and |t| < |x|.
AmplitudePhase modified_amplitude_phase(const Phase& phase, double x, double t, int L);

// Same, with L chosen so that the geometric tail is below `tol`.
AmplitudePhase modified_amplitude_phase_tol(const Phase& phase, double x, double t, double tol = 1e-12);

// Truncation level ⌊d_m⌋ + 2 + ⌈log(1/tol) / log(|x|/|t|)⌉.
int default_truncation(double d_max, double x, double t, double tol);

}  // namespace oscimax
