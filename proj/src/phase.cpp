#include "oscimax/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oscimax/error.hpp"
#include "oscimax/expr.hpp"

namespace oscimax {

namespace {

// |u|^d via exp(d·log|u|); 0 at u = 0 for d > 0.
double abs_pow(double u, double d) {
  const double a = std::abs(u);
  if (a == 0.0) {
    if (d > 0.0) return 0.0;
    if (d == 0.0) return 1.0;
    throw DomainError("|u|^d with d < 0 at u = 0");
  }
  return std::exp(d * std::log(a));
}

double sign(double u) { return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0); }

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw std::overflow_error(std::string(what) + ": result not representable");
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Coefficient

Coefficient::Coefficient(double c) : value_(c), sup_(std::abs(c)) {
  if (c != 0.0) inv_sup_ = 1.0 / std::abs(c);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", c);
  label_ = buf;
}

Coefficient::Coefficient(std::function<double(double)> fn, double sup_bound, std::optional<double> inv_sup_bound,
                         std::string label)
    : fn_(std::move(fn)), sup_(sup_bound), inv_sup_(inv_sup_bound), label_(std::move(label)) {
  if (!(sup_bound >= 0.0) || !std::isfinite(sup_bound)) {
    throw PreconditionError("coefficient sup bound must be finite and non-negative");
  }
  if (inv_sup_bound && (!(*inv_sup_bound > 0.0) || !std::isfinite(*inv_sup_bound))) {
    throw PreconditionError("coefficient ‖1/c‖∞ bound must be finite and positive");
  }
}

double Coefficient::operator()(double x) const {
  if (!fn_) return value_;
  const double v = fn_(x);
  const double slack = 1e-12 * std::max(1.0, sup_);
  if (!(std::abs(v) <= sup_ + slack)) {
    throw PreconditionError("coefficient '" + label_ + "' exceeds its declared sup bound at x = " +
                            std::to_string(x));
  }
  if (inv_sup_ && !(1.0 <= std::abs(v) * (*inv_sup_) * (1.0 + 1e-12))) {
    throw PreconditionError("coefficient '" + label_ + "' violates its declared ‖1/c‖∞ bound at x = " +
                            std::to_string(x));
  }
  return v;
}

// ---------------------------------------------------------------------------
// ScalarFunction

ScalarFunction ScalarFunction::power(double k, bool absolute) {
  ScalarFunction f;
  f.single_power = k != 0.0;
  if (absolute) {
    f.value = [k](double t) { return abs_pow(t, k); };
    f.derivative = [k](double t) { return k == 0.0 ? 0.0 : sign(t) * k * abs_pow(t, k - 1.0); };
    f.second_derivative = [k](double t) { return k * (k - 1.0) * abs_pow(t, k - 2.0); };
    char buf[64];
    std::snprintf(buf, sizeof buf, "|t|^%.17g", k);
    f.label = buf;
  } else {
    if (k != std::floor(k)) throw PreconditionError("signed power t^k needs integer k; use |t|^k");
    f.value = [k](double t) { return std::pow(t, k); };
    f.derivative = [k](double t) { return k * std::pow(t, k - 1.0); };
    f.second_derivative = [k](double t) { return k * (k - 1.0) * std::pow(t, k - 2.0); };
    char buf[64];
    std::snprintf(buf, sizeof buf, "t^%.17g", k);
    f.label = buf;
  }
  return f;
}

ScalarFunction ScalarFunction::from_expression(const std::string& text) {
  const Expr e = Expr::parse(text, 't');
  ScalarFunction f;
  f.value = [e](double t) { return e(t); };
  f.derivative = [e](double t) { return e.eval_dual(t).deriv; };
  f.label = text;
  return f;
}

// ---------------------------------------------------------------------------
// Phase construction

bool LaurentPhase::has_negative_powers() const {
  for (int j = -degree; j < 0; ++j) {
    if (!coeff(j).is_zero()) return true;
  }
  return false;
}

const char* to_string(PhaseFamily f) {
  switch (f) {
    case PhaseFamily::separable:
      return "separable";
    case PhaseFamily::laurent:
      return "laurent";
    case PhaseFamily::curved:
      return "curved";
    case PhaseFamily::quadratic:
      return "quadratic";
    case PhaseFamily::zero:
      return "zero";
  }
  return "?";
}

Phase Phase::zero() { return Phase(ZeroPhase{}); }

Phase Phase::laurent(int degree, std::vector<Coefficient> coeffs) {
  if (degree < 1) throw PreconditionError("Laurent degree must be a positive integer");
  if (coeffs.size() != static_cast<std::size_t>(2 * degree + 1)) {
    throw PreconditionError("Laurent phase needs 2d+1 coefficients (j = -d..d)");
  }
  return Phase(LaurentPhase{degree, std::move(coeffs)});
}

Phase Phase::laurent_monomial(int power, double c) {
  const int d = std::max(1, std::abs(power));
  std::vector<Coefficient> coeffs(static_cast<std::size_t>(2 * d + 1), Coefficient(0.0));
  coeffs[static_cast<std::size_t>(power + d)] = Coefficient(c);
  return laurent(d, std::move(coeffs));
}

Phase Phase::curved(std::vector<Coefficient> coeffs, std::vector<double> exponents) {
  if (coeffs.empty() || coeffs.size() != exponents.size()) {
    throw PreconditionError("curved power sum needs matching, non-empty coefficient and exponent lists");
  }
  for (std::size_t i = 1; i < exponents.size(); ++i) {
    if (!(exponents[i] > exponents[i - 1])) throw PreconditionError("curved exponents must be strictly increasing");
  }
  for (double d : exponents) {
    if (!(d > 0.0)) throw PreconditionError("curved exponents must be positive");
  }
  return Phase(CurvedPowerSum{std::move(coeffs), std::move(exponents)});
}

Phase Phase::quadratic(Coefficient a) {
  if (!a.inv_sup_bound()) throw PreconditionError("quadratic phase needs a declared ‖1/a‖∞");
  return Phase(QuadraticPhase{std::move(a)});
}

Phase Phase::separable(Coefficient alpha, ScalarFunction beta) {
  if (!beta.value || !beta.derivative) throw PreconditionError("separable phase needs β and β'");
  return Phase(SeparablePhase{std::move(alpha), std::move(beta)});
}

PhaseFamily Phase::family() const {
  return std::visit(
      [](const auto& p) -> PhaseFamily {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SeparablePhase>) return PhaseFamily::separable;
        if constexpr (std::is_same_v<T, LaurentPhase>) return PhaseFamily::laurent;
        if constexpr (std::is_same_v<T, CurvedPowerSum>) return PhaseFamily::curved;
        if constexpr (std::is_same_v<T, QuadraticPhase>) return PhaseFamily::quadratic;
        return PhaseFamily::zero;
      },
      v_);
}

bool Phase::x_independent() const {
  return std::visit(
      [](const auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SeparablePhase>) {
          return p.alpha.is_constant();
        } else if constexpr (std::is_same_v<T, LaurentPhase> || std::is_same_v<T, CurvedPowerSum>) {
          return std::all_of(p.coeffs.begin(), p.coeffs.end(), [](const Coefficient& c) { return c.is_constant(); });
        } else if constexpr (std::is_same_v<T, QuadraticPhase>) {
          return p.a.is_constant();
        } else {
          return true;
        }
      },
      v_);
}

PhaseAtX Phase::at(double x) const {
  PhaseAtX f;
  f.family_ = family();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SeparablePhase>) {
          f.scale_ = p.alpha(x);
          f.beta_ = &p.beta;
          f.kink_at_zero_ = true;
          f.single_power_ = p.beta.single_power;
        } else if constexpr (std::is_same_v<T, LaurentPhase>) {
          f.degree_ = p.degree;
          f.c_.resize(p.coeffs.size());
          int nonzero = 0;
          for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
            f.c_[i] = p.coeffs[i](x);
            if (f.c_[i] != 0.0 && static_cast<int>(i) != p.degree) ++nonzero;
          }
          f.singular_at_zero_ = p.has_negative_powers();
          f.single_power_ = nonzero == 1;
        } else if constexpr (std::is_same_v<T, CurvedPowerSum>) {
          f.c_.resize(p.coeffs.size());
          int nonzero = 0;
          for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
            f.c_[i] = p.coeffs[i](x);
            if (f.c_[i] != 0.0) ++nonzero;
          }
          f.d_ = p.exponents;
          f.kink_at_zero_ = true;
          f.single_power_ = nonzero == 1;
        } else if constexpr (std::is_same_v<T, QuadraticPhase>) {
          f.scale_ = p.a(x);
          f.single_power_ = true;
        }
      },
      v_);
  return f;
}

nlohmann::json Phase::to_json() const {
  nlohmann::json j;
  j["family"] = to_string(family());
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        auto coeff_list = [](const std::vector<Coefficient>& cs) {
          nlohmann::json labels = nlohmann::json::array(), sups = nlohmann::json::array();
          for (const auto& c : cs) {
            labels.push_back(c.label());
            sups.push_back(c.sup_bound());
          }
          return std::pair{labels, sups};
        };
        if constexpr (std::is_same_v<T, SeparablePhase>) {
          j["coeffs"] = {p.alpha.label()};
          j["sup_bounds"] = {p.alpha.sup_bound()};
          j["beta"] = p.beta.label;
        } else if constexpr (std::is_same_v<T, LaurentPhase>) {
          auto [labels, sups] = coeff_list(p.coeffs);
          j["coeffs"] = labels;
          j["sup_bounds"] = sups;
          nlohmann::json ex = nlohmann::json::array();
          for (int k = -p.degree; k <= p.degree; ++k) ex.push_back(k);
          j["exponents"] = ex;
        } else if constexpr (std::is_same_v<T, CurvedPowerSum>) {
          auto [labels, sups] = coeff_list(p.coeffs);
          j["coeffs"] = labels;
          j["sup_bounds"] = sups;
          j["exponents"] = p.exponents;
          if (auto inv = p.coeffs.back().inv_sup_bound()) j["inv_sup_bound"] = *inv;
        } else if constexpr (std::is_same_v<T, QuadraticPhase>) {
          j["coeffs"] = {p.a.label()};
          j["sup_bounds"] = {p.a.sup_bound()};
          j["inv_sup_bound"] = *p.a.inv_sup_bound();
        }
      },
      v_);
  return j;
}

// ---------------------------------------------------------------------------
// Frozen evaluation

double PhaseAtX::value(double u) const {
  switch (family_) {
    case PhaseFamily::zero:
      return 0.0;
    case PhaseFamily::quadratic:
      return scale_ * u * u;
    case PhaseFamily::separable:
      return scale_ == 0.0 ? 0.0 : scale_ * beta_->value(u);
    case PhaseFamily::curved: {
      double s = 0.0;
      for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] != 0.0) s += c_[i] * abs_pow(u, d_[i]);
      }
      return s;
    }
    case PhaseFamily::laurent: {
      double pos = 0.0;
      for (int j = degree_; j >= 0; --j) pos = pos * u + c_[static_cast<std::size_t>(j + degree_)];
      if (!singular_at_zero_) return pos;
      if (u == 0.0) throw DomainError("Laurent phase with negative powers evaluated at t = 0");
      const double inv = 1.0 / u;
      double neg = 0.0;
      for (int j = -degree_; j <= -1; ++j) neg = (neg + c_[static_cast<std::size_t>(j + degree_)]) * inv;
      // Horner over 1/u: ((c_{-d}/u + c_{-d+1})/u + …)/u gives Σ c_{-k} u^{-k}.
      return pos + neg;
    }
  }
  return 0.0;
}

double PhaseAtX::dt(double u) const {
  switch (family_) {
    case PhaseFamily::zero:
      return 0.0;
    case PhaseFamily::quadratic:
      return 2.0 * scale_ * u;
    case PhaseFamily::separable:
      return scale_ == 0.0 ? 0.0 : scale_ * beta_->derivative(u);
    case PhaseFamily::curved: {
      double s = 0.0;
      for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        if (u == 0.0) {
          if (d_[i] < 1.0) throw DomainError("∂γ/∂t undefined at u = 0 for exponent < 1");
          continue;
        }
        s += c_[i] * d_[i] * abs_pow(u, d_[i] - 1.0);
      }
      return sign(u) * s;
    }
    case PhaseFamily::laurent: {
      double pos = 0.0;
      for (int j = degree_; j >= 1; --j) pos = pos * u + j * c_[static_cast<std::size_t>(j + degree_)];
      if (!singular_at_zero_) return pos;
      if (u == 0.0) throw DomainError("Laurent phase with negative powers differentiated at t = 0");
      const double inv = 1.0 / u;
      double neg = 0.0;
      for (int j = -degree_; j <= -1; ++j) neg = (neg + j * c_[static_cast<std::size_t>(j + degree_)]) * inv;
      return pos + neg * inv;
    }
  }
  return 0.0;
}

double PhaseAtX::dtt(double u) const {
  switch (family_) {
    case PhaseFamily::zero:
      return 0.0;
    case PhaseFamily::quadratic:
      return 2.0 * scale_;
    case PhaseFamily::separable:
      if (scale_ == 0.0) return 0.0;
      if (!beta_->second_derivative) throw PreconditionError("β'' not available for this separable phase");
      return scale_ * beta_->second_derivative(u);
    case PhaseFamily::curved: {
      double s = 0.0;
      for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        const double k = d_[i] * (d_[i] - 1.0);
        if (k == 0.0) continue;
        s += c_[i] * k * abs_pow(u, d_[i] - 2.0);
      }
      return s;
    }
    case PhaseFamily::laurent: {
      double s = 0.0;
      for (int j = -degree_; j <= degree_; ++j) {
        const double c = c_[static_cast<std::size_t>(j + degree_)];
        if (c == 0.0 || j == 0 || j == 1) continue;
        if (u == 0.0 && j < 2) throw DomainError("Laurent phase with negative powers differentiated at t = 0");
        s += c * j * (j - 1) * std::pow(u, j - 2);
      }
      return s;
    }
  }
  return 0.0;
}

double PhaseAtX::dt_abs_bound(double u1, double u2) const {
  const double lo = std::min(u1, u2), hi = std::max(u1, u2);
  const double amax = std::max(std::abs(lo), std::abs(hi));
  const double amin = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
  switch (family_) {
    case PhaseFamily::zero:
      return 0.0;
    case PhaseFamily::quadratic:
      return 2.0 * std::abs(scale_) * amax;
    case PhaseFamily::curved: {
      double s = 0.0;
      for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        const double e = d_[i] - 1.0;
        const double a = e >= 0.0 ? amax : amin;
        if (a == 0.0 && e < 0.0) return std::numeric_limits<double>::infinity();
        s += std::abs(c_[i]) * d_[i] * abs_pow(a, e);
      }
      return s;
    }
    case PhaseFamily::laurent: {
      double s = 0.0;
      for (int j = -degree_; j <= degree_; ++j) {
        const double c = c_[static_cast<std::size_t>(j + degree_)];
        if (c == 0.0 || j == 0) continue;
        const double a = j >= 1 ? amax : amin;
        if (a == 0.0 && j < 1) return std::numeric_limits<double>::infinity();
        s += std::abs(c) * std::abs(j) * std::pow(a, j - 1);
      }
      return s;
    }
    case PhaseFamily::separable: {
      if (scale_ == 0.0) return 0.0;
      double m = 0.0;
      constexpr int n = 16;
      for (int k = 0; k <= n; ++k) m = std::max(m, std::abs(beta_->derivative(lo + (hi - lo) * k / n)));
      return std::abs(scale_) * m * 1.25;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Public operations

double eval_phase(const Phase& phase, double x, double t) {
  return checked(phase.at(x).value(t), "eval_phase");
}

double phase_dt(const Phase& phase, double x, double u) { return checked(phase.at(x).dt(u), "phase_dt"); }

double derivative_sup_bound(const Phase& phase, double x_lo, double x_hi, double beta) {
  const auto* lp = std::get_if<LaurentPhase>(&phase.variant());
  if (!lp) throw PreconditionError("derivative_sup_bound is defined for Laurent phases only");
  if (lp->degree < 2) throw PreconditionError("derivative_sup_bound requires degree d >= 2");
  if (!(x_lo - beta >= 1.0)) throw PreconditionError("derivative_sup_bound requires x_lo - beta >= 1");
  if (!(x_hi >= x_lo)) throw PreconditionError("derivative_sup_bound requires x_hi >= x_lo");
  double max_sup = 0.0;
  for (const auto& c : lp->coeffs) max_sup = std::max(max_sup, c.sup_bound());
  const double c = 2.0 * lp->degree * max_sup;
  return checked(c * std::pow(x_hi, lp->degree - 1), "derivative_sup_bound");
}

double binomial(double k, int l) {
  if (l < 0) return 0.0;
  double c = 1.0;
  for (int i = 0; i < l; ++i) c *= (k - i) / (i + 1);
  return c;
}

double binom_series_tail(double k, int L) {
  if (!(k >= 2.0)) throw PreconditionError("binom_series_tail requires k >= 2");
  const int fk = static_cast<int>(std::floor(k));
  if (L < fk + 2) throw PreconditionError("binom_series_tail requires L >= floor(k) + 2");
  double ck = 1.0;
  for (int i = 0; i <= fk; ++i) ck *= (k - i);
  return ck / (L - fk);
}

int default_truncation(double d_max, double x, double t, double tol) {
  const int base = static_cast<int>(std::floor(d_max)) + 2;
  if (t == 0.0) return base;
  const double ratio = std::abs(x) / std::abs(t);
  if (!(ratio > 1.0)) throw DomainError("truncation needs |t| < |x|");
  const double extra = std::ceil(std::log(1.0 / tol) / std::log(ratio));
  return base + static_cast<int>(std::min(extra, 100000.0));
}

namespace {

struct PowerTerms {
  std::vector<double> c;  // evaluated c_j(x)
  std::vector<double> d;
};

PowerTerms power_terms(const Phase& phase, double x) {
  if (const auto* cp = std::get_if<CurvedPowerSum>(&phase.variant())) {
    PowerTerms pt;
    for (const auto& c : cp->coeffs) pt.c.push_back(c(x));
    pt.d = cp->exponents;
    return pt;
  }
  if (const auto* qp = std::get_if<QuadraticPhase>(&phase.variant())) return PowerTerms{{qp->a(x)}, {2.0}};
  throw PreconditionError("modified amplitude is defined for curved-power and quadratic phases");
}

// Σ_{l>L} |C(d,l)| ρ^l, bounded through l·|C(d,l)| ≥ |C(d,l)| and the
// Lemma tail bound once l ≥ ⌊d⌋+2; terms below that are summed exactly.
double binomial_tail(double d, double rho, int L) {
  if (rho == 0.0) return 0.0;
  const int fk = static_cast<int>(std::floor(d));
  const int start = std::max(L + 1, fk + 2);
  double s = 0.0;
  for (int l = L + 1; l < start; ++l) s += std::abs(binomial(d, l)) * std::pow(rho, l);
  if (d == std::floor(d)) return s;  // integer exponent: series terminates at l = d
  if (d >= 2.0) {
    s += std::pow(rho, start) * binom_series_tail(d, start);
  } else {
    // 1 < d < 2 is outside the Lemma; |C(d,l)| ≤ 1 for l ≥ 2 gives a geometric bound.
    s += std::pow(rho, start) / (1.0 - rho);
  }
  return s;
}

}  // namespace

AmplitudePhase modified_amplitude_phase(const Phase& phase, double x, double t, int L) {
  if (x == 0.0) throw DomainError("modified amplitude requires x != 0");
  if (!(std::abs(t) < std::abs(x))) throw DomainError("modified amplitude requires |t| < |x|");
  if (L < 1) throw PreconditionError("truncation level must be >= 1");
  const PowerTerms pt = power_terms(phase, x);
  const double ax = std::abs(x);
  const double st = x > 0.0 ? -t : t;
  const double rho = std::abs(t) / ax;

  AmplitudePhase out;
  out.truncation = L;
  for (std::size_t j = 0; j < pt.c.size(); ++j) {
    if (pt.c[j] == 0.0) continue;
    const double d = pt.d[j];
    double s = 0.0;
    for (int l = 2; l <= L; ++l) {
      const double b = binomial(d, l);
      if (b == 0.0) continue;
      s += b * std::pow(st, l) * std::pow(ax, d - l);
    }
    out.value += pt.c[j] * s;
    out.tail_bound += std::abs(pt.c[j]) * std::pow(ax, d) * binomial_tail(d, rho, L);
  }
  if (!std::isfinite(out.value) || !std::isfinite(out.tail_bound)) {
    throw std::overflow_error("modified amplitude overflow");
  }
  return out;
}

AmplitudePhase modified_amplitude_phase_tol(const Phase& phase, double x, double t, double tol) {
  const PowerTerms pt = power_terms(phase, x);
  const double d_max = *std::max_element(pt.d.begin(), pt.d.end());
  if (x == 0.0 || !(std::abs(t) < std::abs(x))) throw DomainError("modified amplitude requires 0 < |t| < |x|");
  return modified_amplitude_phase(phase, x, t, default_truncation(d_max, x, t, tol));
}

}  // namespace oscimax
