#pragma once

// Large-deviation functionals of the magnetization pair: relative entropy,
// alpha_beta, the rate function, the log moment generating function and the
// free energy functional G_beta.

#include <span>
#include <vector>

#include "potts/model.hpp"

namespace potts {

/// R(nu | ref) = sum_k nu_k log(nu_k / ref_k), 0 log 0 = 0.  +infinity when nu
/// charges a coordinate where ref vanishes.
double relative_entropy(const ProbVector& nu, const ProbVector& ref);

/// alpha_beta(gamma, nu) = beta <gamma, nu> - R(gamma | rho) - R(nu | rho).
double alpha(double beta, const ProbVector& gamma, const ProbVector& nu);

/// The same value through the split
/// alpha_diag(gamma) + alpha_diag(nu) - (beta/2) |gamma - nu|^2.
double alpha_split(double beta, const ProbVector& gamma, const ProbVector& nu);

/// alpha_beta(gamma) = (beta/2) <gamma, gamma> - R(gamma | rho).
double alpha_diag(double beta, const ProbVector& gamma);

/// I_beta(gamma, nu) = sup_alpha - alpha(gamma, nu).  Throws InconsistencyError
/// when alpha exceeds sup_alpha by more than `tol` (a stale maximizer).
double rate_function(double beta, const ProbVector& gamma, const ProbVector& nu, double sup_alpha,
                     double tol = 1e-9);

/// Gamma(x, y) = log((1/q) sum e^{x_i}) + log((1/q) sum e^{y_i}).
double lmgf(std::span<const double> x, std::span<const double> y);

/// G_beta(x, y) = beta <x, y> - log((1/q) sum e^{beta x_i}) - log((1/q) sum e^{beta y_i}).
double free_energy_functional(double beta, std::span<const double> x, std::span<const double> y);

/// G_beta(x) + G_beta(y) - (beta/2) |x - y|^2.
double free_energy_functional_split(double beta, std::span<const double> x, std::span<const double> y);

/// G_beta(x) = (beta/2) <x, x> - log((1/q) sum e^{beta x_i}).
double free_energy_functional_diag(double beta, std::span<const double> x);

/// grad G_beta(x) = beta (x - g(x)), g the softmax of beta x.
std::vector<double> free_energy_functional_diag_gradient(double beta, std::span<const double> x);

struct DiagonalMinimum {
  double value = 0.0;            // inf_x G_beta(x, x) = 2 inf_x G_beta(x)
  std::vector<double> argmin;    // x
  int starts = 0;
  long iterations = 0;
};

/// Multi-start descent for inf over x in R^q of G_beta(x, x).
DiagonalMinimum minimize_free_energy_diag(double beta, int q, double grad_tol = 1e-12,
                                          long max_iterations = 2'000'000);

/// sup over P_q x P_q of alpha_beta, via the identity-line reduction
/// 2 max(alpha_diag(rho), alpha_diag(phi(s(beta)))).  Valid for q >= 2.
double sup_alpha(double beta, int q);

/// psi(beta) = -(1/beta) sup alpha, beta > 0.
double free_energy(double beta, int q);

struct DualityReport {
  double sup_alpha = 0.0;
  double inf_g = 0.0;
  double gap = 0.0;  // |sup alpha + inf_x G(x, x)|
};

DualityReport duality_gap(double beta, int q, double grad_tol = 1e-12);

}  // namespace potts
