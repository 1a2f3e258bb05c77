#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oscimax/config.hpp"
#include "oscimax/error.hpp"
#include "oscimax/experiments.hpp"
#include "oscimax/maximal.hpp"
#include "oscimax/norms.hpp"
#include "oscimax/oscquad.hpp"
#include "oscimax/report.hpp"

namespace {

using namespace oscimax;
using nlohmann::json;

struct Common {
  std::string out;
  std::string format = "csv";
  int workers = 0;
  double tol = 1e-8;
  double epsilon = 0.5;
  std::uint64_t seed = 42;
};

SearchConfig search_config(const Common& c) {
  SearchConfig s;
  s.quad_tol = c.tol;
  s.epsilon = c.epsilon;
  s.validate();
  return s;
}

ExperimentOptions experiment_options(const Common& c) {
  ExperimentOptions o;
  o.search = search_config(c);
  o.workers = c.workers > 0 ? c.workers : default_workers();
  return o;
}

void emit(const Common& c, const std::string& content) {
  if (c.out.empty()) {
    std::cout << content;
    std::cout.flush();
  } else {
    write_file_atomic(c.out, content);
  }
}

std::string with_extension(const std::string& path, const std::string& ext) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ext;
  return path.substr(0, dot) + ext;
}

// CSV to --out (plus a JSON summary next to it), or JSON alone.
int emit_report(const Common& c, const ExperimentReport& rep) {
  if (c.format == "json") {
    emit(c, rep.summary_json().dump(2) + "\n");
  } else {
    emit(c, rep.to_csv());
    if (!c.out.empty()) write_file_atomic(with_extension(c.out, ".json"), rep.summary_json().dump(2) + "\n");
  }
  const auto n = rep.counts();
  std::fprintf(stderr, "%s: %d pass, %d fail, %d inconclusive, %d skipped (%.2fs)\n", rep.id.c_str(), n.pass, n.fail,
               n.inconclusive, n.skipped, rep.runtime_seconds);
  return rep.has_failures() ? 1 : 0;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ',';
    s += csv_escape(fields[i]);
  }
  return s + "\r\n";
}

int run_eval(const Common& c, const std::string& phase_spec, const std::string& fn_spec, const std::vector<double>& xs,
             double r) {
  const Phase phase = parse_phase(phase_spec);
  const Function f = parse_function(fn_spec);
  if (!(r > 0.0)) throw ConfigError("--r must be positive");
  json rows = json::array();
  std::string csv = csv_line({"x", "r", "re", "im", "average", "err", "panels", "method", "converged"});
  for (double x : xs) {
    const QuadResult q = average(f, phase, x, r, c.tol);
    const double mag = std::abs(q.value);
    csv += csv_line({format_double(x), format_double(r), format_double(q.value.real()), format_double(q.value.imag()),
                     format_double(mag), format_double(q.abs_error_estimate), std::to_string(q.panels_used),
                     to_string(q.method), q.converged ? "true" : "false"});
    json j = q.to_json();
    j["x"] = x;
    j["r"] = r;
    j["average"] = mag;
    rows.push_back(j);
  }
  emit(c, c.format == "json" ? rows.dump(2) + "\n" : csv);
  return 0;
}

int run_maximal(const Common& c, const std::string& phase_spec, const std::string& fn_spec,
                const std::vector<double>& xs) {
  const Phase phase = parse_phase(phase_spec);
  const Function f = parse_function(fn_spec);
  const SearchConfig cfg = search_config(c);
  const auto samples = evaluate_many(f, phase, xs, cfg, c.workers > 0 ? c.workers : default_workers());
  json rows = json::array();
  std::string csv =
      csv_line({"x", "value", "r_star", "r_half", "err", "quad_err", "grid_err", "case", "boundary_tie", "evaluations"});
  for (const auto& s : samples) {
    csv += csv_line({format_double(s.x), format_double(s.value), format_double(s.r_star), format_double(s.r_half),
                     format_double(s.err), format_double(s.quad_err), format_double(s.grid_err),
                     to_string(s.case_label), s.boundary_tie ? "true" : "false", std::to_string(s.evaluations)});
    rows.push_back(s.to_json());
  }
  emit(c, c.format == "json" ? rows.dump(2) + "\n" : csv);
  return 0;
}

int run_norm(const Common& c, const std::string& fn_spec, double p, double l) {
  const Function f = parse_function(fn_spec);
  const NormReport n = norm_report(f, p, l);
  if (c.format == "json") {
    emit(c, n.to_json().dump(2) + "\n");
    return 0;
  }
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  emit(c, csv_line({"p", "l", "l1", "weighted_l1", "lp_derivative", "llogl", "cpl", "weighted_method", "llogl_method"}) +
              csv_line({format_double(n.p), format_double(n.l), format_double(n.l1), format_double(n.weighted_l1),
                        opt(n.lp_derivative), format_double(n.llogl), opt(n.cpl), n.weighted_method,
                        n.llogl_method}));
  return 0;
}

int run_weights(const Common& c, const std::vector<std::string>& specs, double probe, double tail_start) {
  ExperimentReport rep;
  rep.id = "weights";
  rep.param_columns = {"weight", "condition", "witness"};
  set_config(rep, {{"id", rep.id}, {"weights", specs}, {"probe", probe}, {"tail_start", tail_start}});
  WeightGrid g;
  g.x_max = probe;
  for (const auto& s : specs) {
    const WeightReport w = weight_admissibility(parse_weight(s), tail_start, g);
    auto row = [&](const char* cond, double measured, double witness, bool ok) {
      ReportRow r;
      r.params = {w.label, std::string(cond), witness};
      r.measured = measured;
      r.verdict = ok ? Verdict::pass : Verdict::fail;
      r.flag = ok ? "" : "not_admissible";
      rep.rows.push_back(r);
    };
    row("lower", w.lower_ratio_min, w.lower_ratio_witness, w.lower_pass);
    row("doubling", w.doubling_max, w.doubling_witness, w.doubling_pass);
    row("tail", w.tail_exponent, w.tail_geometric_ratio, w.tail_pass);
    rep.extra[w.label] = w.to_json();
  }
  emit_report(c, rep);
  // Non-admissible weights are a finding here, not a failed bound check.
  return 0;
}

std::vector<double> grid(double lo, double hi, int n, bool log) {
  if (n < 1) throw ConfigError("grid needs at least one point");
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    xs.push_back(log ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  return xs;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "output path (default stdout)");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--workers", c.workers, "worker threads (default OSCIMAX_WORKERS or hardware)");
  app->add_option("--tol", c.tol, "quadrature tolerance");
  app->add_option("--epsilon", c.epsilon, "case-split exponent in (0,1)");
  app->add_option("--seed", c.seed, "corpus seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oscimax: oscillatory maximal functions"};
  app.require_subcommand(1);
  Common c;

  std::string phase_spec = "zero", fn_spec;
  std::string xs_text;
  double r = 1.0;
  auto* eval = app.add_subcommand("eval", "average (1/2r)∫ f e^{iγ} over [x−r, x+r]");
  eval->add_option("--phase", phase_spec, "phase spec");
  eval->add_option("--fn", fn_spec, "function spec")->required();
  eval->add_option("--x", xs_text, "x or comma list")->required();
  eval->add_option("--r", r, "radius")->required();
  add_common(eval, c);

  auto* maximal = app.add_subcommand("maximal", "M_γ f at one or more points");
  maximal->add_option("--phase", phase_spec, "phase spec");
  maximal->add_option("--fn", fn_spec, "function spec")->required();
  maximal->add_option("--x", xs_text, "x or comma list")->required();
  add_common(maximal, c);

  double p = 2.0, l = 1.5;
  auto* norm = app.add_subcommand("norm", "norm report of a test function");
  norm->add_option("--fn", fn_spec, "function spec")->required();
  norm->add_option("--p", p, "derivative exponent");
  norm->add_option("--l", l, "moment exponent");
  add_common(norm, c);

  auto* exp = app.add_subcommand("experiment", "named experiment");
  exp->require_subcommand(1);

  int degree = 0;
  std::string betas_text = "1e-2,3e-3,1e-3,3e-4,1e-4,3e-5";
  LogBetaParams lb;
  auto* logbeta = exp->add_subcommand("logbeta", "window mass of M_γ f_β against log(1/β)");
  logbeta->add_option("--phase", phase_spec, "Laurent phase (default t^3)");
  logbeta->add_option("--d", degree, "shorthand for --phase laurent:t^d");
  logbeta->add_option("--betas", betas_text, "decreasing β list");
  logbeta->add_option("--samples", lb.samples, "pointwise samples per β");
  logbeta->add_option("--window-nodes", lb.window_nodes, "Simpson intervals (multiple of 4)");
  add_common(logbeta, c);

  DecayParams dp;
  double x_lo = 2.0, x_hi = 100.0;
  int n_x = 30;
  auto* decay = exp->add_subcommand("decay", "M_γ χ_[−β,β] against 2/((x−β)|γ'(x−β)|)");
  decay->add_option("--k", dp.k, "phase exponent");
  decay->add_flag("--absolute", dp.absolute, "|t|^k instead of t^k");
  decay->add_option("--beta", dp.beta, "half-width β");
  decay->add_option("--x", xs_text, "comma list of x (overrides the log grid)");
  decay->add_option("--x-min", x_lo, "log grid start");
  decay->add_option("--x-max", x_hi, "log grid end");
  decay->add_option("--n", n_x, "log grid points");
  add_common(decay, c);

  CounterexampleParams cp;
  std::string ce_phase;
  auto* ce1 = exp->add_subcommand("counterexample1", "window mass over Σ h_k(x − k²)");
  auto* ce2 = exp->add_subcommand("counterexample2", "window mass over Σ β_n f_{β_n}(x − 2^{2^n})");
  for (auto* sc : {ce1, ce2}) {
    sc->add_option("--K", cp.K, "number of terms");
    sc->add_option("--window-nodes", cp.window_nodes, "Simpson intervals per window (multiple of 4)");
    sc->add_option("--phase", ce_phase, "phase (default depends on the variant)");
    add_common(sc, c);
  }

  PositiveBoundParams pb;
  int corpus_n = 20;
  std::string pos_phase = "quadratic:1";
  auto* positive = exp->add_subcommand("positive", "(∫ M_γ f + tail)/‖f‖_{C_{p,l}} over a bump corpus");
  positive->add_option("--phase", pos_phase, "quadratic or curved phase");
  positive->add_option("--fn", fn_spec, "single bump instead of the random corpus");
  positive->add_option("--n", corpus_n, "corpus size");
  positive->add_option("--p", pb.p, "derivative exponent");
  positive->add_option("--l", pb.l, "moment exponent");
  positive->add_option("--x-max", pb.X_max, "integration window half-width");
  add_common(positive, c);

  CensusParams cen;
  double g_lo = -50.0, g_hi = 50.0;
  int g_n = 401;
  auto* census = exp->add_subcommand("census", "A1-A4 case census on a grid");
  census->add_option("--phase", phase_spec, "phase spec");
  census->add_option("--fn", fn_spec, "function spec")->required();
  census->add_option("--x-min", g_lo, "grid start");
  census->add_option("--x-max", g_hi, "grid end");
  census->add_option("--n", g_n, "grid points");
  census->add_option("--weak-constant", cen.weak_constant, "C_w");
  add_common(census, c);

  std::vector<std::string> weight_specs = {"psi:2", "psi:1"};
  double probe = 1e6, tail_start = 2.0;
  auto* weights = exp->add_subcommand("weights", "admissibility of weights φ");
  weights->add_option("--weight", weight_specs, "psi:m | power:e | expression in x (repeatable)");
  weights->add_option("--probe", probe, "largest probe radius");
  weights->add_option("--tail-start", tail_start, "R in the tail integral over |x| > R");
  add_common(weights, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "oscimax-error: %s\n", e.what());
    return 2;
  }

  try {
    if (*eval) return run_eval(c, phase_spec, fn_spec, parse_real_list(xs_text), r);
    if (*maximal) return run_maximal(c, phase_spec, fn_spec, parse_real_list(xs_text));
    if (*norm) return run_norm(c, fn_spec, p, l);
    const ExperimentOptions opts = experiment_options(c);
    if (*logbeta) {
      if (degree != 0) phase_spec = "laurent:t^" + std::to_string(degree);
      else if (phase_spec == "zero") phase_spec = "laurent:t^3";
      lb.betas = parse_real_list(betas_text);
      return emit_report(c, exp_logbeta_growth(parse_phase(phase_spec), lb, opts));
    }
    if (*decay) {
      dp.xs = xs_text.empty() ? grid(x_lo, x_hi, n_x, true) : parse_real_list(xs_text);
      return emit_report(c, exp_decay_remark(dp, opts));
    }
    if (*ce1 || *ce2) {
      cp.variant = *ce1 ? CounterexampleSpec::Variant::part1 : CounterexampleSpec::Variant::part2;
      if (!ce_phase.empty()) cp.phase = parse_phase(ce_phase);
      return emit_report(c, exp_counterexample_divergence(cp, opts));
    }
    if (*positive) {
      if (fn_spec.empty()) {
        pb.corpus = bump_corpus(corpus_n, c.seed);
      } else {
        const Function f = parse_function(fn_spec);
        const auto* bump = std::get_if<SmoothTestFn>(&f);
        if (!bump) throw ConfigError("experiment positive needs a bump function");
        pb.corpus = {*bump};
      }
      pb.epsilon = c.epsilon;
      return emit_report(c, exp_positive_bound(parse_phase(pos_phase), pb, opts));
    }
    if (*census) {
      cen.x_grid = grid(g_lo, g_hi, g_n, false);
      return emit_report(c, exp_case_census(parse_function(fn_spec), parse_phase(phase_spec), cen, opts));
    }
    if (*weights) return run_weights(c, weight_specs, probe, tail_start);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "oscimax-error: config: %s\n", e.what());
    return 2;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "oscimax-error: precondition: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "oscimax-error: domain: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "oscimax-error: %s\n", e.what());
    return 3;
  }
  return 0;
}
