#pragma once

// Phase structure of the bipartite Potts model: the critical inverse
// temperature, the mean-field root s(beta), the equilibrium macrostates and
// the rapid-mixing threshold beta_s.

#include <string>
#include <vector>

#include "potts/model.hpp"

namespace potts {

/// beta_c(q) = (2(q-1)/(q-2)) log(q-1), q >= 3.
double beta_critical(int q);

/// phi(s) = (q^{-1}[1 + (q-1)s], q^{-1}(1-s), ..., q^{-1}(1-s)), s in [0, 1].
ProbVector phi(double s, int q);

/// (1 - e^{-beta s}) / (1 + (q-1) e^{-beta s}) - s.
double s_equation_residual(double s, double beta, int q);

struct SRoot {
  double s = 0.0;
  bool nontrivial = false;  // false: s = 0 is the only root in [0, 1]
  double residual = 0.0;
};

/// Largest root of s = (1 - e^{-beta s}) / (1 + (q-1) e^{-beta s}) in [0, 1], q >= 3.
SRoot solve_s(double beta, int q, double tol = 1e-12);

namespace detail {
/// solve_s without the q >= 3 restriction (q = 2 is the Curie-Weiss equation).
SRoot largest_root(double beta, int q, double tol);
}  // namespace detail

enum class Regime { subcritical, critical, supercritical };
std::string to_string(Regime r);

struct PhasePoint {
  double beta = 0.0;
  double s = 0.0;
  Regime regime = Regime::subcritical;
  std::vector<ProbVector> macrostates;  // diagonal points nu; the macrostate is (nu, nu)
  double alpha_rho = 0.0;               // alpha_diag(rho)
  double alpha_nu = 0.0;                // alpha_diag(phi(s)); equals alpha_rho when s = 0
};

/// Equilibrium macrostates, classified against beta_c with |beta - beta_c| <= window
/// counted as critical.
PhasePoint macrostates(double beta, int q, double tol = 1e-12, double critical_window = 1e-9);

/// h(t) = e^{beta t} / (e^{beta t} + (q-1) e^{beta (1-t)/(q-1)}) - t: the margin of
/// g_k(x) < x_k at the worst x with x_k = t (remaining coordinates equal).
double mixing_margin(double t, double beta, int q);

struct MixingSolverOptions {
  int grid = 2000;     // t-grid points per margin scan
  double tol = 1e-12;  // target accuracy in beta
};

struct MixingThreshold {
  double beta_s = 0.0;
  double t_star = 0.0;  // tangency point
  bool newton_converged = false;
  int bisection_steps = 0;
  std::vector<std::string> trace;
};

/// beta_s(q): the largest beta with h(t) < 0 on (1/q, 1], i.e. the tangency
/// h = h' = 0.  Bracketed by bisection on beta, polished by 2-D Newton on (t, beta).
MixingThreshold solve_beta_mixing(int q, MixingSolverOptions options = {});
double beta_mixing(int q, double tol = 1e-12);

}  // namespace potts
