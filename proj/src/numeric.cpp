#include "potts/numeric.hpp"

#include <algorithm>

#include "potts/error.hpp"

namespace potts {

namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth,
              QuadratureResult& res) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  res.evaluations += 2;
  const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
  const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
  const double delta = left + right - p.whole;
  if (std::abs(delta) <= 15.0 * tol) {
    res.error_estimate += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    res.converged = false;
    res.error_estimate += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return refine(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1, res) +
         refine(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1, res);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  int panels, double rel_tol, int max_depth, double abs_floor) {
  if (panels < 1) throw ParameterError("quadrature needs at least one panel");
  if (!(rel_tol > 0.0)) throw ParameterError("quadrature tolerance must be positive");
  QuadratureResult res;
  std::vector<Panel> initial;
  initial.reserve(static_cast<std::size_t>(panels));
  const double h = (b - a) / panels;
  double prev_x = a;
  double prev_f = f(a);
  res.evaluations = 1;
  double estimate = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double x1 = i + 1 == panels ? b : a + (i + 1) * h;
    const double xm = 0.5 * (prev_x + x1);
    const double fm = f(xm);
    const double f1 = f(x1);
    res.evaluations += 2;
    const double s = simpson(prev_x, x1, prev_f, fm, f1);
    initial.push_back({prev_x, xm, x1, prev_f, fm, f1, s});
    estimate += s;
    prev_x = x1;
    prev_f = f1;
  }
  const double tol = std::max(rel_tol * std::abs(estimate), abs_floor);
  double total = 0.0;
  for (const Panel& p : initial) {
    total += refine(f, p, tol * (p.b - p.a) / (b - a), max_depth, res);
  }
  res.value = total;
  return res;
}

}  // namespace potts
