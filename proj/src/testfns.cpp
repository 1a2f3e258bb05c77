#include "oscimax/testfns.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oscimax/error.hpp"
#include "oscimax/gauss_kronrod.hpp"

namespace oscimax {

// ---------------------------------------------------------------------------
// PiecewiseConstantFn

PiecewiseConstantFn::PiecewiseConstantFn(std::vector<double> breakpoints, std::vector<double> values)
    : b_(std::move(breakpoints)), v_(std::move(values)) {
  if (b_.empty() && v_.empty()) return;
  if (b_.size() != v_.size() + 1) throw PreconditionError("step function needs one more breakpoint than values");
  for (double b : b_) {
    if (!std::isfinite(b)) throw PreconditionError("step function breakpoints must be finite");
  }
  for (double v : v_) {
    if (!std::isfinite(v)) throw PreconditionError("step function values must be finite");
  }
  for (std::size_t i = 1; i < b_.size(); ++i) {
    if (!(b_[i] > b_[i - 1])) throw PreconditionError("step function breakpoints must be strictly increasing");
  }
  prefix_.assign(b_.size(), 0.0);
  abs_prefix_.assign(b_.size(), 0.0);
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const double w = b_[i + 1] - b_[i];
    prefix_[i + 1] = prefix_[i] + v_[i] * w;
    abs_prefix_[i + 1] = abs_prefix_[i] + std::abs(v_[i]) * w;
  }
}

std::size_t PiecewiseConstantFn::piece_index(double x) const {
  auto it = std::upper_bound(b_.begin(), b_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - b_.begin());
  i = i == 0 ? 0 : i - 1;
  return std::min(i, v_.size() - 1);
}

double PiecewiseConstantFn::operator()(double x) const {
  if (v_.empty() || x < b_.front() || x >= b_.back()) return 0.0;
  return v_[piece_index(x)];
}

double PiecewiseConstantFn::sup() const {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

double PiecewiseConstantFn::support_radius() const {
  if (v_.empty()) return 0.0;
  return std::max(std::abs(b_.front()), std::abs(b_.back()));
}

double PiecewiseConstantFn::cumulative(double x) const {
  if (v_.empty() || x <= b_.front()) return 0.0;
  if (x >= b_.back()) return prefix_.back();
  const std::size_t i = piece_index(x);
  return prefix_[i] + v_[i] * (x - b_[i]);
}

double PiecewiseConstantFn::abs_cumulative(double x) const {
  if (v_.empty() || x <= b_.front()) return 0.0;
  if (x >= b_.back()) return abs_prefix_.back();
  const std::size_t i = piece_index(x);
  return abs_prefix_[i] + std::abs(v_[i]) * (x - b_[i]);
}

double PiecewiseConstantFn::window_sum(double a, double b, bool absolute) const {
  if (b < a) return -window_sum(b, a, absolute);
  if (v_.empty() || b <= b_.front() || a >= b_.back()) return 0.0;
  double s = 0.0;
  for (std::size_t i = piece_index(std::max(a, b_.front())); i < v_.size() && b_[i] < b; ++i) {
    const double w = std::min(b, b_[i + 1]) - std::max(a, b_[i]);
    s += (absolute ? std::abs(v_[i]) : v_[i]) * w;
  }
  return s;
}

double PiecewiseConstantFn::local_sup(double a, double b) const {
  if (v_.empty() || b <= b_.front() || a >= b_.back()) return 0.0;
  double m = 0.0;
  for (std::size_t i = piece_index(std::max(a, b_.front())); i < v_.size() && b_[i] < b; ++i) {
    m = std::max(m, std::abs(v_[i]));
  }
  return m;
}

PiecewiseConstantFn PiecewiseConstantFn::translated(double shift) const {
  std::vector<double> b = b_;
  for (double& x : b) x += shift;
  return {std::move(b), v_};
}

PiecewiseConstantFn PiecewiseConstantFn::scaled(double factor) const {
  std::vector<double> v = v_;
  for (double& x : v) x *= factor;
  return {b_, std::move(v)};
}

PiecewiseConstantFn PiecewiseConstantFn::sum(const PiecewiseConstantFn& other) const {
  if (other.empty()) return *this;
  if (empty()) return other;
  std::vector<double> b;
  b.reserve(b_.size() + other.b_.size());
  std::merge(b_.begin(), b_.end(), other.b_.begin(), other.b_.end(), std::back_inserter(b));
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<double> v(b.size() - 1);
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    const double mid = 0.5 * (b[i] + b[i + 1]);
    v[i] = (*this)(mid) + other(mid);
  }
  return {std::move(b), std::move(v)};
}

nlohmann::json PiecewiseConstantFn::to_json() const {
  return {{"type", "step"}, {"breakpoints", b_}, {"values", v_}};
}

// ---------------------------------------------------------------------------
// SmoothTestFn

namespace {

// ∫_{-1}^{u} (1 − w²)² dw.
double bump_primitive(double u) {
  u = std::clamp(u, -1.0, 1.0);
  const double u3 = u * u * u;
  return u - 2.0 * u3 / 3.0 + u3 * u * u / 5.0 + 8.0 / 15.0;
}

}  // namespace

SmoothTestFn::SmoothTestFn(double center, double scale, double height) : c_(center), s_(scale), h_(height) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw PreconditionError("bump scale must be positive");
  if (!std::isfinite(center) || !std::isfinite(height)) throw PreconditionError("bump parameters must be finite");
}

double SmoothTestFn::operator()(double x) const {
  const double u = (x - c_) / s_;
  if (std::abs(u) >= 1.0) return 0.0;
  const double w = 1.0 - u * u;
  return h_ * w * w;
}

double SmoothTestFn::derivative(double x) const {
  const double u = (x - c_) / s_;
  if (std::abs(u) >= 1.0) return 0.0;
  return -4.0 * h_ * u * (1.0 - u * u) / s_;
}

double SmoothTestFn::antiderivative(double x) const { return h_ * s_ * bump_primitive((x - c_) / s_); }

double SmoothTestFn::abs_integral(double a, double b) const {
  return std::abs(h_) * s_ * (bump_primitive((b - c_) / s_) - bump_primitive((a - c_) / s_));
}

double SmoothTestFn::local_sup(double a, double b) const {
  const double ua = std::max((a - c_) / s_, -1.0);
  const double ub = std::min((b - c_) / s_, 1.0);
  if (ua >= ub) return 0.0;
  double u = 0.0;
  if (ua > 0.0) u = ua;
  if (ub < 0.0) u = ub;
  const double w = 1.0 - u * u;
  return std::abs(h_) * w * w;
}

double SmoothTestFn::local_derivative_sup(double a, double b) const {
  const double ua = std::max((a - c_) / s_, -1.0);
  const double ub = std::min((b - c_) / s_, 1.0);
  if (ua >= ub) return 0.0;
  // |u(1 − u²)| peaks at |u| = 1/√3.
  const double k = 1.0 / std::sqrt(3.0);
  double m = 0.0;
  for (double u : {ua, ub, -k, k}) {
    if (u >= ua && u <= ub) m = std::max(m, std::abs(u * (1.0 - u * u)));
  }
  return 4.0 * std::abs(h_) * m / s_;
}

double SmoothTestFn::support_radius() const { return std::max(std::abs(c_ - s_), std::abs(c_ + s_)); }

double SmoothTestFn::sup() const { return std::abs(h_); }

double SmoothTestFn::l1() const { return 16.0 / 15.0 * std::abs(h_) * s_; }

double SmoothTestFn::lq_norm(double q) const {
  if (!(q >= 1.0)) throw PreconditionError("lq_norm needs q >= 1");
  if (std::isinf(q)) return sup();
  if (h_ == 0.0) return 0.0;
  // ∫_{-1}^{1} (1 − u²)^{2q} du = B(1/2, 2q + 1).
  return std::abs(h_) * std::pow(s_ * std::beta(0.5, 2.0 * q + 1.0), 1.0 / q);
}

double SmoothTestFn::derivative_lp(double p) const {
  if (!(p >= 1.0)) throw PreconditionError("derivative_lp needs p >= 1");
  if (h_ == 0.0) return 0.0;
  const double amp = 4.0 * std::abs(h_) / s_;
  if (std::isinf(p)) return amp * 2.0 / (3.0 * std::sqrt(3.0));
  // ∫_{-1}^{1} |u(1 − u²)|^p du = B((p + 1)/2, p + 1).
  return amp * std::pow(s_ * std::beta((p + 1.0) / 2.0, p + 1.0), 1.0 / p);
}

double SmoothTestFn::moment(double l) const {
  if (!(l >= 0.0)) throw PreconditionError("moment needs l >= 0");
  if (h_ == 0.0) return 0.0;
  auto integrand = [&](double x) { return std::pow(std::abs(x), l) * std::abs((*this)(x)); };
  std::vector<double> cuts = {c_ - s_, c_ + s_};
  if (cuts[0] < 0.0 && cuts[1] > 0.0) cuts.insert(cuts.begin() + 1, 0.0);
  const bool exact = l == std::floor(l) && l <= 18.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (exact) {
      total += gk::qk15<double>(integrand, cuts[i], cuts[i + 1]).kronrod;
    } else {
      total += gk::integrate(integrand, cuts[i], cuts[i + 1], 0.0, 1e-13).value;
    }
  }
  return total;
}

nlohmann::json SmoothTestFn::to_json() const {
  return {{"type", "bump"}, {"center", c_}, {"scale", s_}, {"height", h_}};
}

// ---------------------------------------------------------------------------
// Function variant helpers

double eval(const Function& f, double x) {
  return std::visit([x](const auto& g) { return g(x); }, f);
}

double l1_norm(const Function& f) {
  return std::visit([](const auto& g) { return g.l1(); }, f);
}

double sup_norm(const Function& f) {
  return std::visit([](const auto& g) { return g.sup(); }, f);
}

double support_radius(const Function& f) {
  return std::visit([](const auto& g) { return g.support_radius(); }, f);
}

double support_lo(const Function& f) {
  return std::visit([](const auto& g) { return g.support_lo(); }, f);
}

double support_hi(const Function& f) {
  return std::visit([](const auto& g) { return g.support_hi(); }, f);
}

double abs_integral(const Function& f, double a, double b) {
  return std::visit([a, b](const auto& g) { return g.abs_integral(a, b); }, f);
}

double local_sup(const Function& f, double a, double b) {
  return std::visit([a, b](const auto& g) { return g.local_sup(a, b); }, f);
}

double local_derivative_sup(const Function& f, double a, double b) {
  if (const auto* g = std::get_if<SmoothTestFn>(&f)) return g->local_derivative_sup(a, b);
  return 0.0;
}

std::vector<double> structural_points(const Function& f) {
  if (const auto* s = std::get_if<PiecewiseConstantFn>(&f)) return s->breakpoints();
  const auto& g = std::get<SmoothTestFn>(f);
  return {g.support_lo(), g.support_hi()};
}

nlohmann::json to_json(const Function& f) {
  return std::visit([](const auto& g) { return g.to_json(); }, f);
}

Function function_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "step") {
    return PiecewiseConstantFn(j.at("breakpoints").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
  }
  if (type == "bump") {
    return SmoothTestFn(j.at("center").get<double>(), j.at("scale").get<double>(), j.value("height", 1.0));
  }
  throw ConfigError("unknown function type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Generators

PiecewiseConstantFn atom_fbeta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw PreconditionError("atom width must be positive");
  const double h = 1.0 / (2.0 * beta);
  return {{-beta, 0.0, beta}, {-h, h}};
}

PiecewiseConstantFn char_fn(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw PreconditionError("indicator half-width must be positive");
  return {{-beta, beta}, {1.0}};
}

SmoothTestFn smooth_bump(double center, double scale, double height) { return {center, scale, height}; }

namespace {

double h1_weight(int k) {
  const double l = std::log(k + 1.0);
  return 1.0 / (k * l * l);
}

void find_overlaps(CounterexampleSpec& spec) {
  for (std::size_t i = 0; i < spec.terms.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.terms.size(); ++j) {
      const auto& a = spec.terms[i];
      const auto& b = spec.terms[j];
      if (a.support_hi > b.support_lo && b.support_hi > a.support_lo) spec.overlaps.emplace_back(a.index, b.index);
    }
  }
}

}  // namespace

double h1_series_bound() {
  double s = 0.0;
  for (int k = 1; k <= 10; ++k) s += h1_weight(k);
  return s + 1.0 / std::log(10.0);
}

std::pair<PiecewiseConstantFn, CounterexampleSpec> counterexample_part1(int K) {
  if (K < 1) throw PreconditionError("counterexample_part1 needs K >= 1");
  CounterexampleSpec spec;
  spec.variant = CounterexampleSpec::Variant::part1;
  spec.K = K;
  spec.h1_total_bound = h1_series_bound();
  PiecewiseConstantFn g;
  for (int k = 1; k <= K; ++k) {
    const double l = std::log(k + 1.0);
    const double n = k * l * l;
    const double coeff = 2.0 / n;
    const double center = static_cast<double>(k) * k;
    // f_n = (n/2)(χ[0,1/n] − χ[−1/n,0]); coefficient 2/n leaves height 1.
    const double half = 0.5 * n * coeff;
    PiecewiseConstantFn term({center - 1.0 / n, center, center + 1.0 / n}, {-half, half});
    g = g.sum(term);
    spec.terms.push_back({k, n, center, coeff, center - 1.0 / n, center + 1.0 / n, h1_weight(k)});
    spec.h1_bound += h1_weight(k);
  }
  find_overlaps(spec);
  return {std::move(g), std::move(spec)};
}

std::pair<PiecewiseConstantFn, CounterexampleSpec> counterexample_part2(int N) {
  if (N < 1 || N > 4) throw PreconditionError("counterexample_part2 supports 1 <= N <= 4");
  CounterexampleSpec spec;
  spec.variant = CounterexampleSpec::Variant::part2;
  spec.K = N;
  spec.h1_total_bound = h1_series_bound();
  PiecewiseConstantFn g;
  for (int n = 1; n <= N; ++n) {
    const double beta = h1_weight(n);
    const double center = std::ldexp(1.0, 1 << n);
    g = g.sum(atom_fbeta(beta).scaled(beta).translated(center));
    spec.terms.push_back({n, beta, center, beta, center - beta, center + beta, beta});
    spec.h1_bound += beta;
  }
  find_overlaps(spec);
  return {std::move(g), std::move(spec)};
}

nlohmann::json CounterexampleSpec::to_json() const {
  nlohmann::json terms_json = nlohmann::json::array();
  for (const auto& t : terms) {
    terms_json.push_back({{"index", t.index},
                          {"scale", t.scale},
                          {"center", t.center},
                          {"coefficient", t.coefficient},
                          {"support", {t.support_lo, t.support_hi}},
                          {"h1_weight", t.h1_weight}});
  }
  nlohmann::json ov = nlohmann::json::array();
  for (const auto& [a, b] : overlaps) ov.push_back({a, b});
  return {{"variant", variant == Variant::part1 ? "part1" : "part2"},
          {"K", K},
          {"terms", terms_json},
          {"h1_bound", h1_bound},
          {"h1_total_bound", h1_total_bound},
          {"overlaps", ov}};
}

}  // namespace oscimax
