#pragma once

// Hand-rolled generators for the property tests and the acceptance binary.
// Everything is driven by splitmix64 so a seed pins the whole corpus.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "oscimax/config.hpp"
#include "oscimax/phase.hpp"
#include "oscimax/testfns.hpp"

namespace oscimax::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double log_uniform(double a, double b) { return a * std::pow(b / a, uniform()); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::uint64_t s_;
};

// 1..8 pieces on [−5, 5] with widths ≥ 0.05; values in [0, 3] or [−3, 3].
inline PiecewiseConstantFn random_step(Rng& rng, bool nonnegative) {
  const int pieces = rng.integer(1, 8);
  std::vector<double> b{rng.uniform(-5.0, 0.0)};
  std::vector<double> v;
  for (int i = 0; i < pieces; ++i) {
    b.push_back(b.back() + rng.uniform(0.05, 1.5));
    double val = nonnegative ? rng.uniform(0.0, 3.0) : rng.uniform(-3.0, 3.0);
    if (rng.uniform() < 0.15) val = 0.0;
    v.push_back(val);
  }
  return PiecewiseConstantFn(std::move(b), std::move(v));
}

inline SmoothTestFn random_bump(Rng& rng, double center_span = 5.0) {
  return smooth_bump(rng.uniform(-center_span, center_span), rng.log_uniform(0.25, 3.0), rng.log_uniform(0.1, 3.0));
}

// The phases the property suites sweep over.
inline std::vector<std::pair<std::string, Phase>> phase_panel() {
  return {
      {"zero", Phase::zero()},
      {"t^2", parse_phase("laurent:t^2")},
      {"t^3", parse_phase("laurent:t^3")},
      {"|t|^2.5", parse_phase("curved:|t|^2.5")},
      {"quadratic(2+sin x)",
       parse_phase(R"j({"family":"quadratic","a":{"expr":"2+sin(x)","sup":3,"inv_sup":1}})j")},
      {"cos(x)t^2", parse_phase("separable:cos(x);t^2;1")},
  };
}

}  // namespace oscimax::testing
