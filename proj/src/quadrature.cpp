#include "gk/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

namespace gk {

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int evals = 0;
  bool ok = true;
  double err = 0.0;

  double call(double x) {
    ++evals;
    return f(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = call(lm);
    const double frm = call(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) {
      ok = false;
      err += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * tol) {
      err += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int panels, int max_depth) {
  Simpson s{f};
  double total = 0.0;
  const double h = (b - a) / panels;
  const double tol = abs_tol / panels;
  double fa = s.call(a);
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == panels) ? b : a + (i + 1) * h;
    const double fm = s.call(0.5 * (lo + hi));
    const double fb = s.call(hi);
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    total += s.recurse(lo, hi, fa, fm, fb, whole, tol, max_depth);
    fa = fb;
  }
  return {total, s.err, s.ok, s.evals};
}

double gauss5(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 5>::integrate(f, a, b);
}

}  // namespace gk
