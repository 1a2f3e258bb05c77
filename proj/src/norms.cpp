#include "oscimax/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "oscimax/config.hpp"
#include "oscimax/error.hpp"
#include "oscimax/expr.hpp"
#include "oscimax/gauss_kronrod.hpp"

namespace oscimax {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ∫_0^x (1 + |t|^l) dt
double weight_antiderivative(double x, double l) {
  return x + std::copysign(std::pow(std::fabs(x), l + 1.0) / (l + 1.0), x);
}

double llogl_density(double v) {
  const double a = std::fabs(v);
  return a * std::log(M_E + a);
}

}  // namespace

double weighted_l1(const Function& f, double l) {
  if (!(l >= 0.0)) throw PreconditionError("weighted_l1: l must be >= 0");
  return std::visit(
      overloaded{
          [&](const PiecewiseConstantFn& g) {
            const auto& b = g.breakpoints();
            const auto& v = g.values();
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i)
              s += std::fabs(v[i]) * (weight_antiderivative(b[i + 1], l) - weight_antiderivative(b[i], l));
            return s;
          },
          [&](const SmoothTestFn& g) { return g.l1() + g.moment(l); },
      },
      f);
}

double llogl_norm(const Function& f) {
  return std::visit(
      overloaded{
          [](const PiecewiseConstantFn& g) {
            const auto& b = g.breakpoints();
            const auto& v = g.values();
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) s += llogl_density(v[i]) * (b[i + 1] - b[i]);
            return s;
          },
          [](const SmoothTestFn& g) {
            auto r = gk::integrate([&](double x) { return llogl_density(g(x)); }, g.support_lo(), g.support_hi(),
                                   1e-15, 1e-13);
            return r.value;
          },
      },
      f);
}

double lp_norm(const Function& f, double q) {
  if (!(q >= 1.0)) throw PreconditionError("lp_norm: q must be >= 1");
  return std::visit(
      overloaded{
          [&](const PiecewiseConstantFn& g) {
            if (std::isinf(q)) return g.sup();
            const auto& b = g.breakpoints();
            const auto& v = g.values();
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) s += std::pow(std::fabs(v[i]), q) * (b[i + 1] - b[i]);
            return std::pow(s, 1.0 / q);
          },
          [&](const SmoothTestFn& g) { return g.lq_norm(q); },
      },
      f);
}

std::optional<double> derivative_lp(const Function& f, double p) {
  if (auto* g = std::get_if<SmoothTestFn>(&f)) return g->derivative_lp(p);
  return std::nullopt;
}

std::optional<double> cpl_norm(const Function& f, double p, double l) {
  auto d = derivative_lp(f, p);
  if (!d) return std::nullopt;
  return weighted_l1(f, l) + *d;
}

NormReport norm_report(const Function& f, double p, double l) {
  NormReport r;
  r.p = p;
  r.l = l;
  r.l1 = l1_norm(f);
  r.weighted_l1 = weighted_l1(f, l);
  r.lp_derivative = derivative_lp(f, p);
  r.llogl = llogl_norm(f);
  if (r.lp_derivative) r.cpl = r.weighted_l1 + *r.lp_derivative;
  const bool step = std::holds_alternative<PiecewiseConstantFn>(f);
  r.weighted_method = step ? "exact" : "quadrature";
  r.llogl_method = step ? "exact" : "quadrature";
  return r;
}

nlohmann::json NormReport::to_json() const {
  nlohmann::json j{{"p", p},           {"l", l},           {"l1", l1}, {"weighted_l1", weighted_l1},
                   {"llogl", llogl},   {"weighted_method", weighted_method}, {"llogl_method", llogl_method}};
  j["lp_derivative"] = lp_derivative ? nlohmann::json(*lp_derivative) : nlohmann::json(nullptr);
  j["cpl"] = cpl ? nlohmann::json(*cpl) : nlohmann::json(nullptr);
  return j;
}

namespace {

template <class Mass>
double exact_step_maximal(const PiecewiseConstantFn& f, double x, Mass mass, bool absolute) {
  if (f.empty()) return 0.0;
  double best = 0.0;
  const auto& b = f.breakpoints();
  auto it = std::lower_bound(b.begin(), b.end(), x);
  // r → 0 gives the mean of the one-sided limits; otherwise breakpoint radii.
  double limit;
  if (it != b.end() && *it == x) {
    const double right = f(x);
    const std::size_t k = static_cast<std::size_t>(it - b.begin());
    const double left = k == 0 ? 0.0 : f.values()[k - 1];
    limit = absolute ? 0.5 * (std::fabs(left) + std::fabs(right)) : std::fabs(0.5 * (left + right));
  } else {
    limit = std::fabs(f(x));
  }
  best = limit;
  for (double bp : b) {
    const double r = std::fabs(bp - x);
    if (r <= 0.0) continue;
    const double lo = x - r, hi = x + r;
    best = std::max(best, std::fabs(mass(lo, hi)) / (hi - lo));
  }
  return best;
}

}  // namespace

double hl_maximal_exact(const PiecewiseConstantFn& f, double x) {
  return exact_step_maximal(f, x, [&](double a, double b) { return f.abs_integral(a, b); }, true);
}

double zero_phase_maximal_exact(const PiecewiseConstantFn& f, double x) {
  return exact_step_maximal(f, x, [&](double a, double b) { return f.integral(a, b); }, false);
}

nlohmann::json InequalityCheck::to_json() const { return {{"lhs", lhs}, {"rhs", rhs}, {"pass", pass}}; }

InequalityCheck check_embedding_q(const SmoothTestFn& f, double p, double q, double tol) {
  InequalityCheck c;
  c.lhs = f.lq_norm(q);
  c.rhs = 2.0 * (2.0 * f.l1() + f.derivative_lp(p));
  c.pass = c.lhs <= c.rhs * (1.0 + tol);
  return c;
}

nlohmann::json LloglCheck::to_json() const {
  return {{"lhs", lhs},
          {"rhs", rhs},
          {"pass", pass},
          {"minimal_constant", minimal_constant},
          {"abs_error", abs_error}};
}

LloglCheck check_llogl_lemma(const Function& f, double s_lo, double s_hi, double C_test) {
  if (!(s_hi > s_lo)) throw PreconditionError("check_llogl_lemma: empty set S");
  std::function<double(double)> mf;
  std::vector<double> cuts{s_lo};
  if (auto* g = std::get_if<PiecewiseConstantFn>(&f)) {
    mf = [g](double x) { return hl_maximal_exact(*g, x); };
    for (double bp : g->breakpoints())
      if (bp > s_lo && bp < s_hi) cuts.push_back(bp);
  } else {
    const auto& s = std::get<SmoothTestFn>(f);
    const Function absf = SmoothTestFn(s.center(), s.scale(), std::fabs(s.height()));
    const Phase zero = Phase::zero();
    SearchConfig cfg;
    cfg.sup_rel_tol = 1e-9;
    mf = [absf, zero, cfg](double x) { return maximal_value(absf, zero, x, cfg).value; };
    for (double bp : {s.support_lo(), s.center(), s.support_hi()})
      if (bp > s_lo && bp < s_hi) cuts.push_back(bp);
  }
  cuts.push_back(s_hi);

  LloglCheck c;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto r = gk::integrate(mf, cuts[i], cuts[i + 1], 1e-12, 1e-9, 400);
    c.lhs += r.value;
    c.abs_error += r.abs_error;
  }
  const double measure = s_hi - s_lo;
  const double ll = llogl_norm(f);
  c.rhs = measure + C_test * ll;
  c.pass = c.lhs <= c.rhs;
  c.minimal_constant = ll > 0.0 ? std::max(0.0, (c.lhs - measure) / ll) : 0.0;
  return c;
}

Weight parse_weight(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  if (colon != std::string::npos && (head == "psi" || head == "power")) {
    const auto v = parse_real_list(spec.substr(colon + 1));
    if (v.size() != 1) throw ConfigError("weight '" + spec + "' needs one parameter");
    return head == "psi" ? psi_weight(v[0]) : power_weight(v[0]);
  }
  return expression_weight(spec);
}

Weight psi_weight(double m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "psi_%g", m);
  return {[m](double x) {
            const double a = std::fabs(x);
            return a >= 1.0 ? 1.0 + a * std::pow(std::log(a), m) : 1.0;
          },
          buf};
}

Weight power_weight(double e) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "1+|x|^%g", e);
  return {[e](double x) { return 1.0 + std::pow(std::fabs(x), e); }, buf};
}

Weight expression_weight(const std::string& text) {
  Expr e = Expr::parse(text, 'x');
  return {[e](double x) { return e(x); }, text};
}

nlohmann::json WeightReport::to_json() const {
  return {{"label", label},
          {"lower_ratio_min", lower_ratio_min},
          {"lower_ratio_witness", lower_ratio_witness},
          {"lower_trend", lower_trend},
          {"lower_pass", lower_pass},
          {"doubling_max", doubling_max},
          {"doubling_witness", doubling_witness},
          {"doubling_last_decade", doubling_last_decade},
          {"doubling_prev_decade", doubling_prev_decade},
          {"doubling_pass", doubling_pass},
          {"tail_blocks", tail_blocks},
          {"tail_partial_sums", tail_partial_sums},
          {"tail_exponent", tail_exponent},
          {"tail_geometric_ratio", tail_geometric_ratio},
          {"tail_pass", tail_pass},
          {"all_pass", all_pass()}};
}

WeightReport weight_admissibility(const Weight& phi, double R_probe, const WeightGrid& grid) {
  if (!(grid.x_min > 0.0 && grid.x_max > 100.0 * grid.x_min && grid.points_per_decade > 0))
    throw PreconditionError("weight_admissibility: bad grid");
  WeightReport rep;
  rep.label = phi.label;

  std::vector<double> xs{0.0};
  const double decades = std::log10(grid.x_max / grid.x_min);
  const int n = static_cast<int>(std::ceil(decades * grid.points_per_decade));
  for (int i = 0; i <= n; ++i) {
    const double a = grid.x_min * std::pow(10.0, decades * i / n);
    xs.push_back(a);
    xs.push_back(-a);
  }

  // φ ≳ 1 + |x|
  rep.lower_ratio_min = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (double x : xs) {
    const double v = phi.fn(x);
    if (!std::isfinite(v)) finite = false;
    const double ratio = v / (1.0 + std::fabs(x));
    if (ratio < rep.lower_ratio_min) {
      rep.lower_ratio_min = ratio;
      rep.lower_ratio_witness = x;
    }
  }
  auto ratio_at = [&](double x) { return phi.fn(x) / (1.0 + std::fabs(x)); };
  rep.lower_trend = std::min(ratio_at(grid.x_max) / ratio_at(grid.x_max / 100.0),
                             ratio_at(-grid.x_max) / ratio_at(-grid.x_max / 100.0));
  rep.lower_pass = finite && rep.lower_ratio_min > 1e-12 && rep.lower_trend >= 0.9;

  // φ(2x) ≲ φ(x)
  const double last_lo = grid.x_max / 20.0, prev_lo = grid.x_max / 200.0;
  for (double x : xs) {
    if (std::fabs(x) > grid.x_max / 2.0) continue;
    const double d = phi.fn(2.0 * x) / phi.fn(x);
    if (!std::isfinite(d)) finite = false;
    if (d > rep.doubling_max) {
      rep.doubling_max = d;
      rep.doubling_witness = x;
    }
    const double a = std::fabs(x);
    if (a >= last_lo) rep.doubling_last_decade = std::max(rep.doubling_last_decade, d);
    else if (a >= prev_lo) rep.doubling_prev_decade = std::max(rep.doubling_prev_decade, d);
  }
  rep.doubling_pass = finite && rep.doubling_last_decade <= 1.05 * rep.doubling_prev_decade + 1e-12;

  // ∫_{|x|>R} 1/φ over dyadic blocks
  const int n0 = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(R_probe, 1.0)))));
  const int n1 = static_cast<int>(std::floor(std::log2(grid.x_max))) - 1;
  std::vector<double> idx;
  double partial = 0.0;
  for (int k = n0; k <= n1; ++k) {
    const double a = std::ldexp(1.0, k), b = 2.0 * a;
    auto inv = [&](double x) { return 1.0 / phi.fn(x) + 1.0 / phi.fn(-x); };
    const double blk = gk::integrate(inv, a, b, 1e-300, 1e-10).value;
    rep.tail_blocks.push_back(blk);
    partial += blk;
    rep.tail_partial_sums.push_back(partial);
    idx.push_back(k);
  }
  const std::size_t nb = rep.tail_blocks.size();
  if (nb >= 4) {
    const std::size_t start = nb / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, ratio = 0;
    int m = 0;
    for (std::size_t i = start; i < nb; ++i) {
      const double lx = std::log(idx[i]), ly = std::log(rep.tail_blocks[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
      if (i + 1 < nb) ratio += rep.tail_blocks[i + 1] / rep.tail_blocks[i];
    }
    rep.tail_exponent = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.tail_geometric_ratio = ratio / (m - 1);
    rep.tail_pass = std::isfinite(partial) &&
                    (rep.tail_geometric_ratio <= 0.9 || rep.tail_exponent >= grid.tail_exponent_min);
  }
  return rep;
}

}  // namespace oscimax
