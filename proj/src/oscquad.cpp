#include "oscimax/oscquad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oscimax/error.hpp"
#include "oscimax/gauss_kronrod.hpp"

namespace oscimax {

const char* to_string(QuadMethod m) {
  switch (m) {
    case QuadMethod::adaptive:
      return "adaptive";
    case QuadMethod::ibp_accelerated:
      return "ibp_accelerated";
    case QuadMethod::exact_piecewise:
      return "exact_piecewise";
  }
  return "?";
}

nlohmann::json QuadResult::to_json() const {
  return {{"re", value.real()},
          {"im", value.imag()},
          {"abs_error_estimate", abs_error_estimate},
          {"panels_used", panels_used},
          {"method", to_string(method)},
          {"converged", converged}};
}

namespace {

using cplx = std::complex<double>;

// One smooth stretch of the integrand: f is a single constant piece (step
// functions) or one polynomial bump, and u = x − t keeps one sign.
struct Segment {
  double p, q;
  bool constant_amp;
  double amp;  // valid when constant_amp
};

class Integrator {
 public:
  Integrator(const Function& f, const PhaseAtX& phase, double x, const QuadOptions& opts)
      : f_(f), phase_(phase), x_(x), opts_(opts) {}

  QuadResult run(double a, double b, double tol) {
    QuadResult out;
    out.method = QuadMethod::adaptive;
    const std::vector<Segment> segs = segments(a, b);
    if (segs.empty()) {
      out.method = QuadMethod::exact_piecewise;
      return out;
    }
    double total_len = 0.0;
    for (const auto& s : segs) total_len += s.q - s.p;
    bool used_ibp = false;
    for (const auto& s : segs) {
      const double share = tol * (s.q - s.p) / total_len;
      if (try_ibp(s, share, out)) {
        used_ibp = true;
        continue;
      }
      integrate_segment(s, share, out);
    }
    if (used_ibp) out.method = QuadMethod::ibp_accelerated;
    if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag())) {
      throw std::overflow_error("osc_integral: non-finite result");
    }
    out.converged = out.converged && out.abs_error_estimate <= tol;
    return out;
  }

 private:
  double dphi(double t) const { return -phase_.dt(x_ - t); }

  cplx integrand(const Segment& s, double t) const {
    const double amp = s.constant_amp ? s.amp : eval(f_, t);
    const double ph = phase_.value(x_ - t);
    return {amp * std::cos(ph), amp * std::sin(ph)};
  }

  std::vector<Segment> segments(double a, double b) const {
    std::vector<Segment> out;
    const double lo = std::max(a, support_lo(f_));
    const double hi = std::min(b, support_hi(f_));
    if (!(lo < hi)) return out;
    if (phase_.singular_at_zero() && x_ >= lo && x_ <= hi) {
      throw DomainError("phase is singular at t = x, which lies in the integration interval");
    }
    std::vector<double> cuts = {lo};
    for (double c : structural_points(f_)) {
      if (c > lo && c < hi) cuts.push_back(c);
    }
    if (!phase_.is_zero() && x_ > lo && x_ < hi) cuts.push_back(x_);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const auto* step = std::get_if<PiecewiseConstantFn>(&f_);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double p = cuts[i], q = cuts[i + 1];
      if (step) {
        const double v = (*step)(0.5 * (p + q));
        if (v != 0.0) out.push_back({p, q, true, v});
      } else {
        out.push_back({p, q, false, 0.0});
      }
    }
    return out;
  }

  // Integration by parts on a constant-amplitude stretch with a single-power
  // phase: keep the boundary term, charge ∫|(1/Φ')'| = |1/Φ'(q) − 1/Φ'(p)|.
  bool try_ibp(const Segment& s, double share, QuadResult& out) const {
    if (!opts_.allow_ibp || !s.constant_amp || !phase_.single_power() || phase_.is_zero()) return false;
    if (x_ - s.p == 0.0 || x_ - s.q == 0.0) return false;
    const double dp = dphi(s.p), dq = dphi(s.q);
    if (dp == 0.0 || dq == 0.0 || (dp > 0.0) != (dq > 0.0)) return false;
    // Only worth it when the stretch spans many oscillations.
    if (std::min(std::abs(dp), std::abs(dq)) * (s.q - s.p) < 64.0 * opts_.phase_budget) return false;
    const double err = std::abs(s.amp) * std::abs(1.0 / dq - 1.0 / dp);
    if (!(err <= share)) return false;
    const double php = phase_.value(x_ - s.p), phq = phase_.value(x_ - s.q);
    const cplx i(0.0, 1.0);
    const cplx val = s.amp * (std::exp(i * phq) / (i * dq) - std::exp(i * php) / (i * dp));
    out.value += val;
    out.abs_error_estimate += err;
    return true;
  }

  double max_dphi(double p, double q) const {
    double m = 0.0;
    for (double w : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double t = p + w * (q - p);
      if (x_ - t == 0.0) continue;
      m = std::max(m, std::abs(dphi(t)));
    }
    return m;
  }

  void panelize(double p, double q, int depth, std::vector<std::pair<double, int>>& starts, double& end) const {
    const double w = q - p;
    const double variation = phase_.is_zero() ? 0.0 : max_dphi(p, q) * w;
    if (variation <= opts_.phase_budget || depth >= opts_.max_depth ||
        static_cast<long>(starts.size()) >= opts_.max_panels) {
      starts.emplace_back(p, depth);
      end = q;
      return;
    }
    const long n = std::clamp(static_cast<long>(std::ceil(variation / opts_.phase_budget)), 2L, 1024L);
    for (long k = 0; k < n; ++k) {
      const double a = p + w * static_cast<double>(k) / static_cast<double>(n);
      const double b = k + 1 == n ? q : p + w * static_cast<double>(k + 1) / static_cast<double>(n);
      panelize(a, b, depth + 1, starts, end);
    }
  }

  void integrate_panel(const Segment& s, double p, double q, int depth, double share, QuadResult& out) const {
    auto g = [&](double t) { return integrand(s, t); };
    const auto r = gk::qk15<cplx>(g, p, q);
    ++out.panels_used;
    // Below this the estimate is rounding in the phase and the weights.
    const double mid_phase = std::abs(phase_.value(x_ - 0.5 * (p + q)));
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * r.resabs * (1.0 + mid_phase);
    if (r.abs_error <= std::max(share, floor) || depth >= opts_.max_depth ||
        !(0.5 * (p + q) > p && 0.5 * (p + q) < q)) {
      if (r.abs_error > share) out.converged = false;
      out.value += r.kronrod;
      out.abs_error_estimate += r.abs_error;
      return;
    }
    const double mid = 0.5 * (p + q);
    integrate_panel(s, p, mid, depth + 1, 0.5 * share, out);
    integrate_panel(s, mid, q, depth + 1, 0.5 * share, out);
  }

  void integrate_segment(const Segment& s, double share, QuadResult& out) const {
    std::vector<std::pair<double, int>> starts;
    double end = s.q;
    panelize(s.p, s.q, 0, starts, end);
    const double len = s.q - s.p;
    for (std::size_t k = 0; k < starts.size(); ++k) {
      const double p = starts[k].first;
      const double q = k + 1 < starts.size() ? starts[k + 1].first : end;
      integrate_panel(s, p, q, starts[k].second, share * (q - p) / len, out);
    }
  }

  const Function& f_;
  const PhaseAtX& phase_;
  double x_;
  const QuadOptions& opts_;
};

QuadResult exact_zero_phase(const Function& f, double a, double b) {
  QuadResult out;
  out.method = QuadMethod::exact_piecewise;
  const double v = std::visit([a, b](const auto& g) { return g.integral(a, b); }, f);
  out.value = {v, 0.0};
  return out;
}

}  // namespace

QuadResult osc_integral(const Function& f, const PhaseAtX& phase, double x, double a, double b, double tol,
                        const QuadOptions& opts) {
  if (!(a <= b)) throw PreconditionError("osc_integral requires a <= b");
  if (!(tol > 0.0)) throw PreconditionError("osc_integral requires tol > 0");
  if (phase.is_zero()) return exact_zero_phase(f, a, b);
  return Integrator(f, phase, x, opts).run(a, b, tol);
}

QuadResult osc_integral(const Function& f, const Phase& phase, double x, double a, double b, double tol,
                        const QuadOptions& opts) {
  const PhaseAtX frozen = phase.at(x);
  return osc_integral(f, frozen, x, a, b, tol, opts);
}

QuadResult average(const Function& f, const Phase& phase, double x, double r, double tol, const QuadOptions& opts) {
  if (!(r > 0.0)) throw PreconditionError("average requires r > 0");
  // Normalize by the width of the rounded window so a constant averages to itself.
  const double lo = x - r, hi = x + r, w = hi - lo;
  QuadResult res = osc_integral(f, phase, x, lo, hi, w * tol, opts);
  res.value /= w;
  res.abs_error_estimate /= w;
  return res;
}

double ibp_tail_bound(const Phase& phase, double a, double b) {
  if (!(a < b)) throw PreconditionError("ibp_tail_bound requires a < b");
  if (a <= 0.0 && b >= 0.0) throw PreconditionError("ibp_tail_bound requires 0 outside [a, b]");
  if (!phase.x_independent()) throw PreconditionError("ibp_tail_bound requires an x-independent phase");
  const PhaseAtX g = phase.at(0.0);
  constexpr int n = 256;
  std::vector<double> d(n + 1);
  for (int i = 0; i <= n; ++i) d[i] = std::abs(g.dt(a + (b - a) * i / n));
  const bool up = std::is_sorted(d.begin(), d.end());
  const bool down = std::is_sorted(d.rbegin(), d.rend());
  if (!up && !down) throw PreconditionError("|γ'| is not monotone on the sampled grid");
  const double m = std::min(d.front(), d.back());
  if (!(m > 0.0)) throw PreconditionError("γ' vanishes at an endpoint");
  return 4.0 / m;
}

}  // namespace oscimax
