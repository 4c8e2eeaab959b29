#include "potts/equilibrium.hpp"

#include <cmath>
#include <sstream>

#include "potts/error.hpp"
#include "potts/ldp.hpp"

namespace potts {

double beta_critical(int q) {
  if (q < 3) throw UnsupportedError("beta_c is defined for q >= 3 (the formula is singular at q = 2)");
  return 2.0 * (q - 1) / (q - 2) * std::log(static_cast<double>(q - 1));
}

ProbVector phi(double s, int q) {
  if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("phi: s must lie in [0, 1], got " + std::to_string(s));
  if (q < 2) throw ParameterError("phi: q must be >= 2");
  std::vector<double> w(static_cast<std::size_t>(q), (1.0 - s) / q);
  w[0] = (1.0 + (q - 1) * s) / q;
  return ProbVector(std::move(w));
}

double s_equation_residual(double s, double beta, int q) {
  const double e = std::exp(-beta * s);
  return (1.0 - e) / (1.0 + (q - 1) * e) - s;
}

namespace {

// d/ds of the right-hand side: q beta E / (1 + (q-1) E)^2, E = e^{-beta s}.
double rhs_slope(double s, double beta, int q) {
  const double e = std::exp(-beta * s);
  const double d = 1.0 + (q - 1) * e;
  return q * beta * e / (d * d);
}

}  // namespace

namespace detail {

SRoot largest_root(double beta, int q, double tol) {
  if (!(tol > 0.0)) throw ParameterError("solve_s: tol must be positive");
  if (!(beta >= 0.0)) throw ParameterError("solve_s: beta must be >= 0");
  if (beta == 0.0) return {};

  // The right side is a logistic curve in beta*s with inflection at
  // beta*s = log(q-1); beyond it the residual is concave, so it has a single
  // maximum there and the largest root (if any) lies to its right.
  const double lo = std::min(std::log(static_cast<double>(q - 1)) / beta, 1.0);
  double peak = lo;
  if (rhs_slope(lo, beta, q) - 1.0 > 0.0) {
    double a = lo;
    double b = 1.0;
    if (rhs_slope(b, beta, q) - 1.0 >= 0.0) {
      peak = b;
    } else {
      for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
        const double m = 0.5 * (a + b);
        (rhs_slope(m, beta, q) - 1.0 > 0.0 ? a : b) = m;
      }
      peak = 0.5 * (a + b);
    }
  }
  if (!(s_equation_residual(peak, beta, q) > 0.0)) return {};

  double a = peak;
  double b = 1.0;
  for (int it = 0; it < 300; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    (s_equation_residual(m, beta, q) > 0.0 ? a : b) = m;
  }
  const double ra = s_equation_residual(a, beta, q);
  const double rb = s_equation_residual(b, beta, q);
  SRoot root;
  root.s = std::abs(ra) <= std::abs(rb) ? a : b;
  root.residual = std::min(std::abs(ra), std::abs(rb));
  root.nontrivial = true;
  if (root.residual > tol) {
    std::ostringstream msg;
    msg << "solve_s: residual " << root.residual << " above tol " << tol << " at beta=" << beta;
    throw ConvergenceError(msg.str(), {"bracket [" + std::to_string(a) + ", " + std::to_string(b) + "]"});
  }
  return root;
}

}  // namespace detail

SRoot solve_s(double beta, int q, double tol) {
  if (q < 3) throw UnsupportedError("solve_s is defined for q >= 3");
  return detail::largest_root(beta, q, tol);
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::subcritical: return "subcritical";
    case Regime::critical: return "critical";
    case Regime::supercritical: return "supercritical";
  }
  return "unknown";
}

PhasePoint macrostates(double beta, int q, double tol, double critical_window) {
  const double bc = beta_critical(q);
  PhasePoint p;
  p.beta = beta;
  const SRoot root = solve_s(beta, q, tol);
  p.s = root.s;
  const ProbVector rho = ProbVector::uniform(q);
  p.alpha_rho = alpha_diag(beta, rho);
  p.alpha_nu = root.nontrivial ? alpha_diag(beta, phi(root.s, q)) : p.alpha_rho;

  if (std::abs(beta - bc) <= critical_window) {
    p.regime = Regime::critical;
  } else {
    p.regime = beta < bc ? Regime::subcritical : Regime::supercritical;
  }
  if (p.regime != Regime::supercritical) p.macrostates.push_back(rho);
  if (p.regime != Regime::subcritical) {
    if (!root.nontrivial) {
      throw ConvergenceError("macrostates: no nontrivial root at beta=" + std::to_string(beta));
    }
    const ProbVector nu1 = phi(root.s, q);
    for (int i = 0; i < q; ++i) {
      std::vector<double> w(nu1.weights().begin(), nu1.weights().end());
      std::swap(w[0], w[static_cast<std::size_t>(i)]);
      p.macrostates.emplace_back(std::move(w));
    }
  }
  return p;
}

double mixing_margin(double t, double beta, int q) {
  const double a = beta * q / (q - 1);
  return 1.0 / (1.0 + (q - 1) * std::exp(-a * (t - 1.0 / q))) - t;
}

namespace {

struct MarginPeak {
  double t;
  double value;
};

MarginPeak margin_peak(double beta, int q, int grid) {
  const double t0 = 1.0 / q;
  const double span = 1.0 - t0;
  int best = 1;
  double best_v = mixing_margin(t0 + span / grid, beta, q);
  for (int i = 2; i <= grid; ++i) {
    const double v = mixing_margin(t0 + span * i / grid, beta, q);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  // golden section on the bracketing cells
  double a = t0 + span * std::max(best - 1, 0) / grid;
  double b = t0 + span * std::min(best + 1, grid) / grid;
  if (a <= t0) a = t0 + span * 1e-9;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = mixing_margin(c, beta, q);
  double fd = mixing_margin(d, beta, q);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = mixing_margin(c, beta, q);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = mixing_margin(d, beta, q);
    }
  }
  const double tm = 0.5 * (a + b);
  const double vm = mixing_margin(tm, beta, q);
  return vm > best_v ? MarginPeak{tm, vm} : MarginPeak{t0 + span * best / grid, best_v};
}

}  // namespace

MixingThreshold solve_beta_mixing(int q, MixingSolverOptions options) {
  if (q < 3) throw UnsupportedError("beta_s is computed for q >= 3");
  if (options.grid < 10) throw ParameterError("beta_mixing: grid too coarse");
  MixingThreshold out;

  // At beta = q the margin has zero slope at t = 1/q and is positive just
  // right of it, so [0, q] brackets the threshold.
  double lo = 0.0;
  double hi = static_cast<double>(q);
  if (!(margin_peak(hi, q, options.grid).value > 0.0)) {
    throw ConvergenceError("beta_mixing: no violation found at beta = q", {"grid=" + std::to_string(options.grid)});
  }
  while (hi - lo > std::max(options.tol, 1e-14)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const MarginPeak pk = margin_peak(mid, q, options.grid);
    (pk.value > 0.0 ? hi : lo) = mid;
    ++out.bisection_steps;
    if (out.bisection_steps % 8 == 0) {
      std::ostringstream line;
      line.precision(17);
      line << "bisection " << out.bisection_steps << ": [" << lo << ", " << hi << "] peak t=" << pk.t;
      out.trace.push_back(line.str());
    }
  }
  const double bisected = 0.5 * (lo + hi);
  double t = margin_peak(hi, q, options.grid).t;
  double beta = bisected;

  // Newton on F(t, beta) = (h, h_t).
  for (int it = 0; it < 50; ++it) {
    const double a = beta * q / (q - 1);
    const double e = std::exp(-a * (t - 1.0 / q));
    const double sig = 1.0 / (1.0 + (q - 1) * e);
    const double sp = sig * (1.0 - sig);
    const double h = sig - t;
    const double ht = a * sp - 1.0;
    const double htt = a * a * sp * (1.0 - 2.0 * sig);
    const double dsig_db = sp * (q * t - 1.0) / (q - 1);
    const double hb = dsig_db;
    const double htb = static_cast<double>(q) / (q - 1) * sp + a * (1.0 - 2.0 * sig) * dsig_db;
    const double det = ht * htb - hb * htt;
    if (det == 0.0 || !std::isfinite(det)) break;
    const double dt = (h * htb - hb * ht) / det;
    const double db = (ht * ht - htt * h) / det;
    t -= dt;
    beta -= db;
    if (!(t > 1.0 / q && t <= 1.0) || !std::isfinite(beta)) break;
    if (std::abs(dt) < 1e-15 && std::abs(db) < 1e-15) {
      out.newton_converged = true;
      break;
    }
    if (std::abs(h) < 1e-16 && std::abs(ht) < 1e-15) {
      out.newton_converged = true;
      break;
    }
  }
  const double bracket = std::max(1e-8, 10.0 * options.tol);
  if (out.newton_converged && std::abs(beta - bisected) <= bracket) {
    out.beta_s = beta;
    out.t_star = t;
  } else {
    out.newton_converged = false;
    out.beta_s = bisected;
    out.t_star = margin_peak(bisected, q, options.grid).t;
    out.trace.push_back("newton rejected; using bisection value");
  }
  return out;
}

double beta_mixing(int q, double tol) {
  MixingSolverOptions o;
  o.tol = tol;
  return solve_beta_mixing(q, o).beta_s;
}

}  // namespace potts
