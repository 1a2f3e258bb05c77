#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>

namespace oscimax::gk {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
// Nodes are listed from the outside in; index 7 is the centre.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd Kronrod nodes xgk[1], xgk[3], xgk[5], xgk[7].
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct RuleResult {
  T kronrod{};
  T gauss{};
  double abs_error = 0.0;  // QUADPACK-style estimate from |K − G|
  double resabs = 0.0;     // ∫|f|
};

namespace detail {
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
}  // namespace detail

// Apply G7/K15 on [a,b]. F maps double -> T (double or std::complex<double>).
template <class T, class F>
RuleResult<T> qk15(F&& f, double a, double b) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  std::array<T, 7> fv1{}, fv2{};
  const T fc = f(centr);
  T resg = fc * wg[3];
  T resk = fc * wgk[7];
  double resabs = detail::magnitude(resk);

  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = hlgth * xgk[jtw];
    const T f1 = f(centr - absc);
    const T f2 = f(centr + absc);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += wg[j] * (f1 + f2);
    resk += wgk[jtw] * (f1 + f2);
    resabs += wgk[jtw] * (detail::magnitude(f1) + detail::magnitude(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = hlgth * xgk[jtwm1];
    const T f1 = f(centr - absc);
    const T f2 = f(centr + absc);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += wgk[jtwm1] * (f1 + f2);
    resabs += wgk[jtwm1] * (detail::magnitude(f1) + detail::magnitude(f2));
  }

  const T reskh = resk * 0.5;
  double resasc = wgk[7] * detail::magnitude(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += wgk[j] * (detail::magnitude(fv1[j] - reskh) + detail::magnitude(fv2[j] - reskh));
  }

  RuleResult<T> out;
  out.kronrod = resk * hlgth;
  out.gauss = resg * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double err = detail::magnitude((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double epmach = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * epmach)) err = std::max(epmach * 50.0 * resabs, err);
  out.abs_error = err;
  out.resabs = resabs;
  return out;
}

struct Integral {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = true;
};

// Globally adaptive G7/K15 on [a,b] (bisect the interval with the largest
// error until the total estimate is below max(abs_tol, rel_tol·|I|)).
Integral integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                   double rel_tol = 0.0, int max_intervals = 4000);

}  // namespace oscimax::gk
