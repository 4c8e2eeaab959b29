#pragma once

// Aggregate path coupling diagnostics: monotone paths between configurations,
// the discrete aggregate variation S1 + S2, the continuous aggregate
// g-variation D^g along straight lines, and contraction checks near rho.

#include <cstdint>
#include <vector>

#include "potts/model.hpp"

namespace potts {

struct MonotonePath {
  std::vector<BipartiteConfig> waypoints;
  double epsilon = 0.0;
  int flips_per_link = 0;  // j; every link but possibly the last flips exactly j sites
};

/// Geodesic from a to b flipping each disagreeing site once, directly to its
/// value in b.  Within a side, flips follow the straight magnetization path;
/// each link takes j = ceil(epsilon n / 2) flips from whichever side is further
/// behind, so every full link moves the magnetization pair by 2j/n in
/// [epsilon, 2 epsilon).  Throws ParameterError when no such j exists or when
/// some flip would move a magnetization coordinate against its net direction.
MonotonePath build_monotone_path(const BipartiteConfig& a, const BipartiteConfig& b, double epsilon);

/// A configuration with magnetization `target` reached from `from` by flipping
/// only sites whose spin is in surplus, lowest indices first.  The pair
/// (from, result) always admits a monotone path.
SpinConfig nearest_config_with_magnetization(const SpinConfig& from, const LatticePoint& target);

struct PathAudit {
  bool additive = false;       // link distances sum to the endpoint distance
  bool monotone = false;       // every magnetization coordinate monotone on both sides
  bool spacing = false;        // full links have increments in [eps, 2 eps)
  int short_links = 0;         // trailing links below eps (0 or 1 when valid)
  double min_increment = 0.0;  // over full links
  double max_increment = 0.0;
  bool ok() const { return additive && monotone && spacing && short_links <= 1; }
};

PathAudit audit(const MonotonePath& path);

struct AggregateVariation {
  double s1 = 0.0;  // left components
  double s2 = 0.0;  // right components
  double total() const { return s1 + s2; }
};

/// S1 = sum_k sum_i |<L(x_i) - L(x_{i-1}), grad g_k(L(x_{i-1}))>| on the left side, S2 on the right.
AggregateVariation discrete_aggregate_variation(const MonotonePath& path, double beta);

/// sum_k int_0^1 |<b - a, grad g_k((1-t) a + t b)>| dt by adaptive Simpson
/// (relative tolerance rel_tol) starting from quad_points panels.
double continuous_aggregate_variation(const ProbVector& a, const ProbVector& b, double beta, int quad_points = 16,
                                      double rel_tol = 1e-8);

/// [D^g(x_start -> x_end) + D^g(y_start -> y_end)] / [|dx|_1 + |dy|_1].
double contraction_ratio(const ProbVector& x_start, const ProbVector& y_start, const ProbVector& x_end,
                         const ProbVector& y_end, double beta, int quad_points = 16);

struct ContractionCase {
  ProbVector x_start;
  ProbVector y_start;
  ProbVector x_end;
  ProbVector y_end;
  double ratio = 0.0;
};

/// Starts uniform on P_q x P_q; ends (rho, rho) + r u with u a random sum-zero
/// direction of unit l1 norm over both sides and r uniform in (0, radius].
/// Sample i uses RngSpec{seed, i}; OpenMP across samples.  radius <= 1/q.
std::vector<ContractionCase> sample_contraction_near_rho(double beta, int q, double radius, int samples,
                                                         std::uint64_t seed);

/// Starts (x, x) over the lattice points of P_q with denominator `grid`, rho
/// excluded; end (rho, rho).
std::vector<ContractionCase> contraction_grid_to_rho(double beta, int q, int grid);

/// max over sampled x with |x - rho|_1 in (0, radius] of |g(x) - g(rho)|_1 / |x - rho|_1.
/// Sample i is drawn from RngSpec{seed, i}; OpenMP across samples.
double lipschitz_ratio_near_rho(double beta, int q, double radius, int samples, std::uint64_t seed = 1);

/// l1 norm of the Jacobian of g at rho restricted to sum-zero directions (the
/// limit of the ratio above as radius -> 0), and the unrestricted l1 operator norm.
double jacobian_tangent_norm_at_rho(double beta, int q);
double jacobian_l1_norm_at_rho(double beta, int q);

namespace serial {
double lipschitz_ratio_near_rho(double beta, int q, double radius, int samples, std::uint64_t seed = 1);
}  // namespace serial

struct DecayFit {
  double slope = 0.0;  // per step, of log E[d]
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// Least-squares line through (t, log mean_distance[t / stride]) over the
/// window where the mean lies in [floor, upper_fraction * mean_distance[0]].
DecayFit fit_exponential_decay(const std::vector<double>& mean_distance, std::uint64_t stride,
                               double upper_fraction, double floor);

}  // namespace potts
