#include "oscimax/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <vector>

#include "oscimax/error.hpp"

namespace oscimax {

const char* to_string(CaseLabel c) {
  switch (c) {
    case CaseLabel::A1:
      return "A1";
    case CaseLabel::A2:
      return "A2";
    case CaseLabel::A3:
      return "A3";
    case CaseLabel::A4_1:
      return "A4_1";
    case CaseLabel::A4_2:
      return "A4_2";
    case CaseLabel::unclassified:
      return "unclassified";
  }
  return "?";
}

void SearchConfig::validate() const {
  if (!(r_min_scale > 0.0)) throw ConfigError("r_min_scale must be positive");
  if (points_per_decade < 1) throw ConfigError("points_per_decade must be >= 1");
  if (refine_top_k < 0) throw ConfigError("refine_top_k must be >= 0");
  if (!(quad_tol > 0.0)) throw ConfigError("quad_tol must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (m_cut && !(*m_cut > 1.0)) throw ConfigError("m_cut must exceed 1");
  if (!(half_factor > 0.0 && half_factor <= 1.0)) throw ConfigError("half_factor must lie in (0, 1]");
  if (!(sup_rel_tol >= 0.0)) throw ConfigError("sup_rel_tol must be non-negative");
  if (max_evaluations < 1) throw ConfigError("max_evaluations must be >= 1");
}

SearchConfig SearchConfig::from_json(const nlohmann::json& j) {
  SearchConfig c;
  c.r_min_scale = j.value("r_min_scale", c.r_min_scale);
  c.points_per_decade = j.value("points_per_decade", c.points_per_decade);
  c.refine_top_k = j.value("refine_top_k", c.refine_top_k);
  c.quad_tol = j.value("quad_tol", c.quad_tol);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.half_factor = j.value("half_factor", c.half_factor);
  c.sup_rel_tol = j.value("sup_rel_tol", c.sup_rel_tol);
  c.max_evaluations = j.value("max_evaluations", c.max_evaluations);
  if (j.contains("m_cut")) {
    const auto& m = j.at("m_cut");
    if (m.is_string()) {
      if (m.get<std::string>() != "auto") throw ConfigError("m_cut must be \"auto\" or a number");
    } else {
      c.m_cut = m.get<double>();
    }
  }
  c.validate();
  return c;
}

nlohmann::json SearchConfig::to_json() const {
  nlohmann::json j = {{"r_min_scale", r_min_scale}, {"points_per_decade", points_per_decade},
                      {"refine_top_k", refine_top_k}, {"quad_tol", quad_tol},
                      {"epsilon", epsilon},           {"half_factor", half_factor},
                      {"sup_rel_tol", sup_rel_tol},   {"max_evaluations", max_evaluations}};
  if (m_cut) {
    j["m_cut"] = *m_cut;
  } else {
    j["m_cut"] = "auto";
  }
  return j;
}

nlohmann::json MaximalSample::to_json() const {
  return {{"x", x},
          {"value", value},
          {"r_star", r_star},
          {"r_half", r_half},
          {"err", err},
          {"case_label", to_string(case_label)},
          {"boundary_tie", boundary_tie},
          {"quad_err", quad_err},
          {"grid_err", grid_err},
          {"evaluations", evaluations}};
}

namespace {

using cplx = std::complex<double>;

// C(s) = ∫_x^s f(t) e^{iγ(x,x−t)} dt, memoised at the radii already visited so
// each new radius only integrates the gap from its nearest known node.
class RadialProfile {
 public:
  RadialProfile(const Function& f, const Phase& phase, double x, double tol_per_length)
      : f_(f), frozen_(phase.at(x)), x_(x), tol_(tol_per_length) {
    nodes_.emplace(x, Node{});
  }

  struct Avg {
    double abs = 0.0;
    double err = 0.0;
  };

  Avg average(double r) {
    ++evaluations;
    const Node hi = at(x_ + r);
    const Node lo = at(x_ - r);
    const double w = (x_ + r) - (x_ - r);  // not 2r once rounded
    return {std::abs(hi.value - lo.value) / w, (hi.err + lo.err) / w};
  }

  // ∫_{x−r}^{x+r} |f| / 2r, the trivial bound on |average|.
  double envelope(double r) const { return abs_integral(f_, x_ - r, x_ + r) / (2.0 * r); }

  long evaluations = 0;

 private:
  struct Node {
    cplx value{};
    double err = 0.0;
  };

  Node at(double s) {
    if (frozen_.is_zero()) {
      const double v = std::visit([&](const auto& g) { return g.integral(x_, s); }, f_);
      return {cplx(v, 0.0), 0.0};
    }
    auto it = nodes_.lower_bound(s);
    if (it != nodes_.end() && it->first == s) return it->second;
    auto best = nodes_.end();
    if (it != nodes_.end()) best = it;
    if (it != nodes_.begin()) {
      auto prev = std::prev(it);
      if (best == nodes_.end() || s - prev->first < best->first - s) best = prev;
    }
    const double s0 = best->first;
    const double a = std::min(s0, s), b = std::max(s0, s);
    const QuadResult q = osc_integral(f_, frozen_, x_, a, b, tol_ * (b - a) + 1e-300);
    Node n;
    n.value = best->second.value + (s > s0 ? q.value : -q.value);
    n.err = best->second.err + q.abs_error_estimate;
    nodes_.emplace_hint(it, s, n);
    return n;
  }

  const Function& f_;
  PhaseAtX frozen_;
  double x_;
  double tol_;
  std::map<double, Node> nodes_;
};

struct Eval {
  double B = 0.0;  // |∫_{x−r}^{x+r} f e^{iγ}|
  double err = 0.0;
};

class Search {
 public:
  Search(const Function& f, const Phase& phase, double x, const SearchConfig& cfg)
      : f_(f), x_(x), cfg_(cfg), frozen_(phase.at(x)), profile_(f, phase, x, cfg.quad_tol) {
    build_grid();
  }

  MaximalSample run() {
    MaximalSample s;
    s.x = x_;
    if (l1_norm(f_) == 0.0) {
      s.r_star = s.r_half = grid_.front();
      s.evaluations = profile_.evaluations;
      return s;
    }
    scan();
    polish();
    const double gap = certify();
    s.value = best_;
    s.r_star = r_star_;
    s.quad_err = max_quad_err_;
    s.grid_err = gap;
    s.err = s.quad_err + s.grid_err;
    s.r_half = half_radius(best_);
    s.evaluations = profile_.evaluations;
    return s;
  }

  // Smallest radius with |average| ≥ half_factor·value. Gaps between known
  // radii are only opened when the Lipschitz bound allows a crossing there.
  double half_radius(double value) {
    const double thr = cfg_.half_factor * value;
    std::vector<double> pts = grid_;
    for (const auto& [r, e] : evals_) pts.push_back(r);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (avg_at(pts.front()) >= thr) return pts.front();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (auto r = first_crossing(pts[i], pts[i + 1], thr, 0)) return *r;
    }
    return r_star_ > 0.0 ? r_star_ : pts.back();
  }

 private:
  void build_grid() {
    const double lo = support_lo(f_), hi = support_hi(f_);
    const double dist = x_ < lo ? lo - x_ : (x_ > hi ? x_ - hi : 0.0);
    const double S = support_radius(f_);
    const double r_min = cfg_.r_min_scale * (1.0 + dist);
    // Once [x−r, x+r] covers the support the integral is constant in r, so
    // |average| only decays beyond that radius.
    const double r_cover = std::max(std::abs(x_ - lo), std::abs(x_ - hi));
    const double r_max = std::max({2.0 * (std::abs(x_) + S), 10.0 * r_min, r_cover});
    const double step = std::log(10.0) / cfg_.points_per_decade;
    const int n = static_cast<int>(std::ceil(std::log(r_max / r_min) / step));
    for (int k = 0; k <= n; ++k) grid_.push_back(r_min * std::exp(step * k));
    for (double b : structural_points(f_)) {
      const double r = std::abs(x_ - b);
      if (r > 0.0) grid_.push_back(r);
    }
    std::sort(grid_.begin(), grid_.end());
    grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());
  }

  const Eval& evaluate(double r) {
    auto it = evals_.find(r);
    if (it != evals_.end()) return it->second;
    const auto a = profile_.average(r);
    max_quad_err_ = std::max(max_quad_err_, a.err);
    if (a.abs > best_) {
      best_ = a.abs;
      r_star_ = r;
    }
    return evals_.emplace(r, Eval{2.0 * r * a.abs, 2.0 * r * a.err}).first->second;
  }

  double avg_at(double r) { return evaluate(r).B / (2.0 * r); }

  // ∫_{x−r}^{x+r} |f|.
  double mass(double r) const { return abs_integral(f_, x_ - r, x_ + r); }

  // Upper bound for |average| on [p, q], the tighter of two bounds on
  // B(r) = |G(r)|, G(r) = ∫_{x−r}^{x+r} f(t) e^{iγ(x,x−t)} dt:
  //  - Lipschitz: |G'| ≤ |f(x+r)| + |f(x−r)| ≤ 2m, so B ≤ min(B_p + 2m(r−p), B_q + 2m(q−r));
  //    each branch over 2r is monotone, so it peaks at p, q or where the lines cross.
  //  - curvature: |G − linear interpolant| ≤ (q−p)²/8 · sup|G''|, and
  //    |G''| ≤ Σ_± |f'| + |f|·|∂_uγ| on the two swept strips.
  // [p, q] never straddles a breakpoint radius, so f is smooth on both strips.
  double upper_bound(double p, double q) const {
    const double by_mass = mass(q) / (2.0 * p);
    auto ip = evals_.find(p), iq = evals_.find(q);
    if (ip == evals_.end() || iq == evals_.end()) return by_mass;
    const double Bp = ip->second.B, Bq = iq->second.B;
    const double fr = local_sup(f_, x_ + p, x_ + q), fl = local_sup(f_, x_ - q, x_ - p);
    const double m = 0.5 * (fr + fl);
    double lip = std::max(Bp / (2.0 * p), Bq / (2.0 * q));
    if (m > 0.0) {
      const double rc = std::clamp((Bq - Bp + 2.0 * m * (p + q)) / (4.0 * m), p, q);
      const double peak = std::min(Bp + 2.0 * m * (rc - p), Bq + 2.0 * m * (q - rc));
      lip = std::max(lip, peak / (2.0 * rc));
    }
    double curv = by_mass;
    if (m > 0.0) {
      double g2 = 0.0;
      if (fr > 0.0) g2 += local_derivative_sup(f_, x_ + p, x_ + q) + fr * frozen_.dt_abs_bound(-q, -p);
      if (fl > 0.0) g2 += local_derivative_sup(f_, x_ - q, x_ - p) + fl * frozen_.dt_abs_bound(p, q);
      const double w = q - p;
      curv = (std::max(Bp, Bq) + w * w * g2 / 8.0) / (2.0 * p);
    }
    return std::min({lip, curv, by_mass});
  }

  void scan() {
    for (double r : grid_) {
      if (mass(r) / (2.0 * r) <= best_) continue;
      evaluate(r);
    }
    if (r_star_ == 0.0) r_star_ = grid_.front();
  }

  // Golden-section polish around the best few evaluated radii.
  void polish() {
    std::vector<std::pair<double, double>> cand;
    for (const auto& [r, e] : evals_) {
      if (e.B > 0.0) cand.emplace_back(e.B / (2.0 * r), r);
    }
    std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (cand.size() > static_cast<std::size_t>(cfg_.refine_top_k)) cand.resize(cfg_.refine_top_k);
    for (const auto& [v, r] : cand) {
      auto it = std::lower_bound(grid_.begin(), grid_.end(), r);
      const double lo = it == grid_.begin() ? r : *std::prev(it);
      auto jt = std::upper_bound(grid_.begin(), grid_.end(), r);
      const double hi = jt == grid_.end() ? r : *jt;
      if (hi > lo) golden(lo, hi);
    }
  }

  void golden(double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = avg_at(c), fd = avg_at(d);
    for (int it = 0; it < 200 && b - a > 1e-7 * b; ++it) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = avg_at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = avg_at(d);
      }
    }
  }

  // Branch and bound on the Lipschitz envelope until no gap between known
  // radii can hide a value above best + tolerance. Returns the remaining gap.
  double certify() {
    struct Item {
      double ub, p, q;
      bool operator<(const Item& o) const { return ub < o.ub || (ub == o.ub && p > o.p); }
    };
    std::vector<double> pts = grid_;
    for (const auto& [r, e] : evals_) pts.push_back(r);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::priority_queue<Item> heap;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) heap.push({upper_bound(pts[i], pts[i + 1]), pts[i], pts[i + 1]});
    long budget = cfg_.max_evaluations;
    while (!heap.empty()) {
      const double tol = std::max(cfg_.quad_tol, cfg_.sup_rel_tol * best_);
      Item it = heap.top();
      if (it.ub <= best_ + tol) break;
      if (budget-- <= 0) break;
      heap.pop();
      const bool have_p = evals_.count(it.p) != 0, have_q = evals_.count(it.q) != 0;
      if (!have_p || !have_q) {
        if (!have_p) evaluate(it.p);
        if (!have_q) evaluate(it.q);
        heap.push({upper_bound(it.p, it.q), it.p, it.q});
        continue;
      }
      const double mid = 0.5 * (it.p + it.q);
      if (!(mid > it.p && mid < it.q)) continue;
      evaluate(mid);
      heap.push({upper_bound(it.p, mid), it.p, mid});
      heap.push({upper_bound(mid, it.q), mid, it.q});
    }
    if (heap.empty()) return 0.0;
    // Below r_min the average is bounded by the local level of |f| at x.
    double gap = std::max(0.0, heap.top().ub - best_);
    const double r0 = pts.front();
    gap = std::max(gap, local_sup(f_, x_ - r0, x_ + r0) - best_);
    return gap;
  }

  std::optional<double> first_crossing(double p, double q, double thr, int depth) {
    if (avg_at(p) >= thr) return p;
    const bool q_hits = avg_at(q) >= thr;
    if (upper_bound(p, q) < thr) return std::nullopt;
    if (q - p <= 1e-10 * q || depth > 200 || --crossing_budget_ < 0) {
      if (q_hits) return q;
      return std::nullopt;
    }
    const double mid = 0.5 * (p + q);
    if (auto r = first_crossing(p, mid, thr, depth + 1)) return r;
    return first_crossing(mid, q, thr, depth + 1);
  }

  const Function& f_;
  double x_;
  const SearchConfig& cfg_;
  PhaseAtX frozen_;
  RadialProfile profile_;
  std::vector<double> grid_;
  std::map<double, Eval> evals_;
  double best_ = 0.0;
  double r_star_ = 0.0;
  double max_quad_err_ = 0.0;
  long crossing_budget_ = cfg_.max_evaluations;
};

}  // namespace

double auto_m_cut(const Phase& phase) {
  std::vector<double> sups, exps;
  double inv_top = 0.0;
  if (const auto* cp = std::get_if<CurvedPowerSum>(&phase.variant())) {
    for (const auto& c : cp->coeffs) sups.push_back(c.sup_bound());
    exps = cp->exponents;
    const auto inv = cp->coeffs.back().inv_sup_bound();
    if (!inv) throw PreconditionError("curved phase needs ‖1/c_m‖∞ for the cutoff");
    inv_top = *inv;
  } else {
    // Quadratic (a single term) and the remaining families: the condition is
    // vacuous, use the floor.
    return 2.0;
  }
  const std::size_t m = exps.size() - 1;
  auto holds = [&](double M) {
    double rhs = 0.0;
    for (std::size_t j = 0; j < m; ++j) rhs += exps[j] * sups[j] * std::pow(M, exps[j] - 1.0);
    return exps[m] / inv_top * std::pow(M, exps[m] - 1.0) >= 2.0 * rhs;
  };
  double lo = 2.0;
  if (holds(lo)) return lo;
  double hi = 4.0;
  while (!holds(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::overflow_error("auto_m_cut: no cutoff found");
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double resolve_m_cut(const Phase& phase, const SearchConfig& cfg) { return cfg.m_cut ? *cfg.m_cut : auto_m_cut(phase); }

Classification classify_case(const MaximalSample& s, double m_cut, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("classify_case requires epsilon in (0, 1)");
  if (!(m_cut > 1.0)) throw PreconditionError("classify_case requires M_cut > 1");
  Classification c;
  const double ax = std::abs(s.x);
  if (ax <= m_cut) {
    c.label = CaseLabel::A1;
    return c;
  }
  const double rtol = 1e-9 * std::max(ax, 1.0);
  if (s.r_half <= ax / 2.0 + rtol) {
    c.boundary_tie = std::abs(s.r_half - ax / 2.0) <= rtol;
    const double threshold = std::pow(ax, -(1.0 + epsilon));
    if (s.value <= threshold + s.err) {
      c.label = CaseLabel::A2;
      c.boundary_tie = c.boundary_tie || s.value > threshold - s.err;
    } else {
      c.label = CaseLabel::A3;
    }
    return c;
  }
  if (s.r_half >= 2.0 * ax - rtol) {
    c.label = CaseLabel::A4_1;
    c.boundary_tie = s.r_half < 2.0 * ax + rtol;
  } else {
    c.label = CaseLabel::A4_2;
  }
  return c;
}

MaximalSample maximal_value(const Function& f, const Phase& phase, double x, const SearchConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(x)) throw PreconditionError("maximal_value requires finite x");
  Search search(f, phase, x, cfg);
  MaximalSample s = search.run();
  const Classification c = classify_case(s, resolve_m_cut(phase, cfg), cfg.epsilon);
  s.case_label = c.label;
  s.boundary_tie = c.boundary_tie;
  return s;
}

double radius_function(const Function& f, const Phase& phase, double x, const MaximalSample& sample,
                       const SearchConfig& cfg) {
  cfg.validate();
  Search search(f, phase, x, cfg);
  return search.half_radius(sample.value);
}

}  // namespace oscimax
