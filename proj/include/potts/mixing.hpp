#pragma once

// Mixing-time measurements.  The magnetization pair (L_n(sigma), L_n(tau)) is
// itself a Markov chain under the dynamics, so small-n distances to
// equilibrium are computed exactly on that projected chain; for large n the
// coupling time of the greedy coupling gives an upper-bound surrogate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "potts/kernel.hpp"
#include "potts/lattice.hpp"
#include "potts/model.hpp"

namespace potts {

struct ProjectedCap {
  std::uint64_t max_states = 100'000;  // |P_n|^2
};

/// Pair index = rank(z) * |P_n| + rank(w), as in MagnetizationLaw.
struct ProjectedChain {
  CompositionIndex lattice;
  SparseKernel kernel;
  std::size_t index(std::span<const int> left, std::span<const int> right) const {
    return lattice.rank(left) * lattice.size() + lattice.rank(right);
  }
};

/// From (z, w): with prob (1/2) z_m g_k(w) move z by (e_k - e_m)/n, and
/// symmetrically on the right.
ProjectedChain projected_kernel(const ModelParams& params, ProjectedCap cap = {});

/// Closed form pi(z, w) proportional to multinom(n; z) multinom(n; w) exp(beta n <z, w>).
std::vector<double> projected_stationary(const ModelParams& params, const CompositionIndex& lattice);

struct PowerIteration {
  std::vector<double> pi;
  int iterations = 0;
  double residual = 0.0;  // max |pi K - pi|
};

/// Iterates pi <- pi K from the uniform vector until successive iterates differ by <= tol.
PowerIteration stationary_by_power_iteration(const SparseKernel& k, double tol = 1e-15,
                                             int max_iterations = 1'000'000);

struct TvCurve {
  std::vector<std::uint64_t> times;
  std::vector<double> distances;        // d(t): max over starts of TV(row of K^t, pi)
  std::vector<double> pair_distances;   // dbar(t) over `dbar_scope` start pairs
  std::vector<std::size_t> argmax_start;
  std::optional<std::uint64_t> t_mix_quarter;
  std::string start_scope;  // "all" or "corners"
  std::string dbar_scope;   // "all" or "corners" (corners gives a lower bound on dbar)
};

struct TvOptions {
  std::uint64_t all_starts_max = 5000;  // use every lattice pair as a start up to this many
  std::uint64_t dbar_all_max = 100;     // dbar over all start pairs up to this many starts
};

/// Exact projected-chain distance curve for t = 0..t_max (OpenMP across starts).
TvCurve exact_tv_curve(const ModelParams& params, std::uint64_t t_max, ProjectedCap cap = {},
                       TvOptions options = {});

namespace serial {
TvCurve exact_tv_curve(const ModelParams& params, std::uint64_t t_max, ProjectedCap cap = {},
                       TvOptions options = {});
}  // namespace serial

/// TV(row of K^t from `start`, pi) for t = 0..t_max on the projected chain.
std::vector<double> projected_tv_from(const ProjectedChain& chain, const std::vector<double>& pi,
                                      std::size_t start, std::uint64_t t_max);

/// Estimated P(X_t != Y_t) with X_0 = x0 and Y_0 ~ Gibbs (exact sampler), t = 0..t_max.
struct CouplingBound {
  std::vector<double> p;
  std::vector<double> stderr_;
};
CouplingBound coupling_upper_bound(const ModelParams& params, const BipartiteConfig& x0, std::uint64_t t_max,
                                   std::uint64_t seed, int replicas);

struct ScalingPoint {
  int n = 0;
  double mean = 0.0;  // over replicas that coalesced
  double stderr_ = 0.0;
  int replicas = 0;
  int timeouts = 0;
  std::uint64_t t_max = 0;
};

struct ScalingFit {
  std::vector<ScalingPoint> points;
  double slope_a = 0.0;    // mean ~ a n log n, least squares through the origin
  double r_squared = 0.0;  // 1 - SS_res / SS_tot with SS_tot about the mean
  bool flagged = false;    // some replica timed out
  std::string warning;
};

struct ScalingOptions {
  double t_max_factor = 200.0;  // t_max = ceil(factor * n log n)
};

/// Adversarial starts: all spins 0 vs all spins 1 on both sides.
ScalingFit coupling_time_scaling(int q, double beta, const std::vector<int>& n_list, int replicas,
                                 std::uint64_t seed, ScalingOptions options = {});

struct EscapePoint {
  int n = 0;
  double radius = 0.0;
  double mean = 0.0;    // censored mean: timeouts count as the cap
  double stderr_ = 0.0;
  int replicas = 0;
  int censored = 0;
  std::uint64_t cap = 0;
};

struct EscapeOptions {
  double cap_factor = 1000.0;  // cap = ceil(factor * n log n)
  std::optional<double> radius;  // default: half of |phi(s(beta)) - rho|_1
};

/// Steps until |L_n(left) - rho|_1 <= r starting from all spins 0 on both sides.
std::vector<EscapePoint> slow_mixing_probe(int q, double beta, const std::vector<int>& n_list, int replicas,
                                           std::uint64_t seed, EscapeOptions options = {});

/// Escape radius used by default: half of |phi(s) - rho|_1, with s = s(beta) when a
/// nontrivial root exists and s(beta_c) otherwise.
double default_escape_radius(int q, double beta);

}  // namespace potts
