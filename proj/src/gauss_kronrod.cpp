#include "oscimax/gauss_kronrod.hpp"

#include <queue>
#include <vector>

namespace oscimax::gk {

namespace {

struct Piece {
  double a, b, value, err;
  bool operator<(const Piece& o) const { return err < o.err; }
};

}  // namespace

Integral integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                   int max_intervals) {
  Integral out;
  if (a == b) return out;
  std::priority_queue<Piece> heap;
  const auto first = qk15<double>(f, a, b);
  heap.push({a, b, first.kronrod, first.abs_error});
  double total = first.kronrod, err = first.abs_error;
  int n = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (n >= max_intervals) {
      out.converged = false;
      break;
    }
    const Piece p = heap.top();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > std::min(p.a, p.b) && mid < std::max(p.a, p.b))) {
      out.converged = false;
      break;
    }
    heap.pop();
    const auto l = qk15<double>(f, p.a, mid);
    const auto r = qk15<double>(f, mid, p.b);
    total += l.kronrod + r.kronrod - p.value;
    err += l.abs_error + r.abs_error - p.err;
    heap.push({p.a, mid, l.kronrod, l.abs_error});
    heap.push({mid, p.b, r.kronrod, r.abs_error});
    ++n;
  }
  // Re-sum from the pieces so the running update does not accumulate rounding.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().err;
    heap.pop();
  }
  out.value = total;
  out.abs_error = err;
  out.intervals = n;
  return out;
}

}  // namespace oscimax::gk
