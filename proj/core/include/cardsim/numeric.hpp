#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace cardsim {

namespace detail {

inline double simpson_panel(double a, double fa, double b, double fb,
                            double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson_rec(F& f, double a, double fa, double b, double fb,
                            double m, double fm, double whole, double tol,
                            int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson_panel(a, fa, m, fm, flm);
  double right = simpson_panel(m, fm, b, fb, frm);
  double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol)
    return left + right + err / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, tol / 2, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, tol / 2, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature to absolute tolerance abs_tol.
template <class F>
double adaptive_simpson(F f, double a, double b, double abs_tol,
                        int max_depth = 60) {
  if (!(a <= b)) throw std::invalid_argument("adaptive_simpson: a > b");
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = detail::simpson_panel(a, fa, b, fb, fm);
  return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, abs_tol,
                                      max_depth);
}

// Bisection root of a continuous g with a sign change on [lo, hi].
// Terminates when the bracket width falls below x_rel_tol relative to the
// endpoint magnitude (absolute near zero).
template <class G>
double bisect(G g, double lo, double hi, double x_rel_tol,
              int max_iter = 400) {
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo < 0.0) == (ghi < 0.0))
    throw std::invalid_argument("bisect: no sign change on bracket");
  bool increasing = glo < 0.0;
  for (int i = 0; i < max_iter; ++i) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo <= x_rel_tol * std::max({std::abs(lo), std::abs(hi), 1e-300}))
      return mid;
    double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == increasing)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cardsim
