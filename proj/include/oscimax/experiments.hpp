#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "oscimax/maximal.hpp"
#include "oscimax/norms.hpp"
#include "oscimax/phase.hpp"
#include "oscimax/report.hpp"
#include "oscimax/testfns.hpp"

namespace oscimax {

struct ExperimentOptions {
  SearchConfig search;
  int workers = 1;
};

// M_γ at many points, evaluated in parallel, results in input order.
std::vector<MaximalSample> evaluate_many(const Function& f, const Phase& phase, const std::vector<double>& xs,
                                         const SearchConfig& cfg, int workers);

// ---- E1: ‖M_γ f_β‖₁ over [1+β, X(β)] grows like log(1/β) ----

struct LogBetaParams {
  std::vector<double> betas;
  int samples = 20;       // pointwise checks of M_γ f_β(x) ≥ 1/(8x) per β
  int window_nodes = 32;  // Simpson intervals in log x for the window integral
};

// c = 2d·max_j ‖c_j‖∞ for a Laurent phase of degree d ≥ 2.
double laurent_growth_constant(const Phase& phase);
// X(β) = (1/(2cβ))^{1/(d−1)}.
double logbeta_window_end(double c, int d, double beta);

ExperimentReport exp_logbeta_growth(const Phase& phase, const LogBetaParams& params, const ExperimentOptions& opts);

// ---- E2: M_γ(χ_[−β,β])(x) ≤ 2/((x−β)|γ'(x−β)|) ----

struct DecayParams {
  double k = 2.0;
  bool absolute = false;  // |t|^k instead of t^k
  double beta = 0.5;
  std::vector<double> xs;
};

Phase decay_phase(double k, bool absolute);

ExperimentReport exp_decay_remark(const DecayParams& params, const ExperimentOptions& opts);

// ---- E3: window mass of M_γ over the counterexample sums ----

struct CounterexampleParams {
  CounterexampleSpec::Variant variant = CounterexampleSpec::Variant::part1;
  int K = 10;
  int window_nodes = 16;
  std::optional<Phase> phase;  // default: cos(x)·t² (part 1), 0.01·t² (part 2)
};

Phase default_counterexample_phase(CounterexampleSpec::Variant v);

// Largest δ ≤ 1 with |β(t) − β(0)| ≤ 1/(10‖α‖∞) on |t| ≤ δ (grid step 1e-4).
double separable_delta(const Phase& separable);

// Σ_{k≤K} 1/(k log(k+1)).
double divergent_comparator(int K);

ExperimentReport exp_counterexample_divergence(const CounterexampleParams& params, const ExperimentOptions& opts);

// ---- E4: (∫_{|x|≤X} M_γf + tail bound) / ‖f‖_{C_{p,l}} ----

struct PositiveBoundParams {
  std::vector<SmoothTestFn> corpus;
  double p = 2.0;
  double l = 1.5;
  double epsilon = 0.5;
  double X_max = 20.0;  // raised to twice the support radius when smaller
  double rel_tol = 1e-3;
};

// Explicit constants of the Case-4 envelope for a curved-power or quadratic
// phase. For |x| ≥ max(M_cut, 2·supp f),
//   M_γf(x) ≤ (2/|x|)·[ 2/(d_m μ |x|^{d_m−1}) · B(x) + W |x|^{−ε} ],
//   B(x) = ‖f'‖_p (|x|^{1/p'} + (2|x|)^{1/p'}) + A W |x|^{d_m−1−ε},
// with μ = ‖1/c_m‖∞⁻¹, A = Σ_j ‖c_j‖∞ Σ_{l≥2} l|C(d_j,l)|, W = ‖|t|^ε f‖₁.
struct TailEnvelope {
  double d_m = 0.0;
  double mu = 0.0;
  double A = 0.0;
  double m_cut = 0.0;

  // ∫_{|x|>X} of the envelope; +∞ when d_m − 1/p' ≤ 1.
  double tail_integral(double X, double deriv_p_norm, double W, double p, double epsilon) const;
};

TailEnvelope tail_envelope(const Phase& phase, const SearchConfig& cfg);

// Σ_{l≥2} l·|C(d,l)|: exact terms below L plus the series-lemma tail bound.
double binomial_weight_sum(double d, int L = 200);

// Translates and dilates of the unit bump, reproducible from the seed:
// centers uniform in [−center_span, center_span], scales log-uniform in
// [scale_lo, scale_hi], height 1.
std::vector<SmoothTestFn> bump_corpus(int n, std::uint64_t seed, double center_span = 10.0, double scale_lo = 0.5,
                                      double scale_hi = 2.0);

ExperimentReport exp_positive_bound(const Phase& phase, const PositiveBoundParams& params,
                                    const ExperimentOptions& opts);

// ---- E5: A₁–A₄ census ----

struct CensusParams {
  std::vector<double> x_grid;  // sorted
  double weak_constant = 2.0;  // C_w used in |A₃| ≤ 8·C_w·‖(1+|t|^{1+ε})f‖₁
};

ExperimentReport exp_case_census(const Function& f, const Phase& phase, const CensusParams& params,
                                 const ExperimentOptions& opts);

}  // namespace oscimax
