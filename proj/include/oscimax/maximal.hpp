#pragma once

#include <optional>

#include <json.hpp>

#include "oscimax/oscquad.hpp"
#include "oscimax/phase.hpp"
#include "oscimax/testfns.hpp"

namespace oscimax {

enum class CaseLabel { A1, A2, A3, A4_1, A4_2, unclassified };

const char* to_string(CaseLabel c);

struct SearchConfig {
  double r_min_scale = 1e-4;
  int points_per_decade = 64;
  int refine_top_k = 5;
  double quad_tol = 1e-8;
  double epsilon = 0.5;
  std::optional<double> m_cut;  // empty: chosen from the phase
  double half_factor = 0.5;     // r(x) threshold as a fraction of the sup
  // The certified gap between the reported value and the sup is driven below
  // max(quad_tol, sup_rel_tol·value) unless max_evaluations runs out first.
  double sup_rel_tol = 1e-6;
  long max_evaluations = 200000;

  static SearchConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct MaximalSample {
  double x = 0.0;
  double value = 0.0;
  double r_star = 0.0;
  double r_half = 0.0;
  double err = 0.0;
  CaseLabel case_label = CaseLabel::unclassified;
  bool boundary_tie = false;
  double quad_err = 0.0;  // largest quadrature error among evaluated radii
  double grid_err = 0.0;  // gap term around r_star
  long evaluations = 0;

  nlohmann::json to_json() const;
};

struct Classification {
  CaseLabel label = CaseLabel::unclassified;
  bool boundary_tie = false;
};

// Approximates sup_r |average(f, phase, x, r)| by a logarithmic radius grid
// plus golden-section refinement around the best candidates.
MaximalSample maximal_value(const Function& f, const Phase& phase, double x, const SearchConfig& cfg = {});

// Smallest radius whose |average| reaches half_factor·sample.value.
double radius_function(const Function& f, const Phase& phase, double x, const MaximalSample& sample,
                       const SearchConfig& cfg = {});

Classification classify_case(const MaximalSample& sample, double m_cut, double epsilon);

// Smallest M ≥ 2 with d_m ‖1/c_m‖⁻¹ M^{d_m−1} ≥ 2 Σ_{j<m} d_j ‖c_j‖ M^{d_j−1}
// for curved or quadratic phases; 2 for the other families.
double auto_m_cut(const Phase& phase);

double resolve_m_cut(const Phase& phase, const SearchConfig& cfg);

}  // namespace oscimax
