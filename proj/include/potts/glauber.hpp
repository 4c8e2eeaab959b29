#pragma once

// Heat-bath Glauber dynamics on K_{n,n}.  A left spin is resampled from
// g(L_n(tau)) and a right spin from g(L_n(sigma)), g the softmax of beta*z.

#include <cstdint>
#include <string>
#include <vector>

#include "potts/gibbs_exact.hpp"
#include "potts/kernel.hpp"
#include "potts/model.hpp"
#include "potts/rng.hpp"

namespace potts {

/// g_k(z) = e^{beta z_k} / sum_j e^{beta z_j}.
ProbVector g_map(const ProbVector& z, double beta);
void g_map(std::span<const double> z, double beta, std::span<double> out);

/// Row-major q x q matrix with entry (k, j) = beta g_k(z) (delta_kj - g_j(z)).
std::vector<double> g_jacobian(const ProbVector& z, double beta);

struct ChainState {
  BipartiteConfig config;
  MagnetizationPair mags;
  std::uint64_t step = 0;

  explicit ChainState(BipartiteConfig cfg) : config(std::move(cfg)), mags(magnetization(config)) {}
};

/// Throws InconsistencyError when the cached magnetizations are stale.
void check_invariants(const ChainState& state);

/// Law of the new spin at (side, vertex): g_map of the opposite side's magnetization.
ProbVector update_distribution(const ModelParams& params, const ChainState& state, Side side,
                               std::size_t vertex);

/// Single-step kernel over full configurations assembled from update_distribution.
SparseKernel glauber_kernel_from_update_laws(const ModelParams& params, EnumerationCap cap = {});

/// exp(beta (c - n) / n) for c = 0..n: unnormalized update weights, all <= 1.
std::vector<double> update_weight_table(const ModelParams& params);

/// Index k with cumulative weight first exceeding u * sum(weights).
int sample_spin(std::span<const double> weights, double u);

struct TrajectoryRecord {
  std::uint64_t step;
  MagnetizationPair mags;
};

class GlauberChain {
 public:
  GlauberChain(ModelParams params, RngSpec rng, BipartiteConfig initial);

  const ModelParams& params() const noexcept { return params_; }
  const ChainState& state() const noexcept { return state_; }

  /// One vertex update.  The draws for step t depend only on (seed, stream, t).
  void step();
  void advance(std::uint64_t steps);

  /// Trajectory with records at steps 0, k, 2k, ..., floor(steps/k) k.
  std::vector<TrajectoryRecord> run(std::uint64_t steps, std::uint64_t record_every);

 private:
  ModelParams params_;
  CounterRng rng_;
  ChainState state_;
  std::vector<double> table_;
};

/// "uniform" (iid uniform spins drawn from `rng`), "ordered:k" (all spins k, 0-based).
BipartiteConfig initial_config(const ModelParams& params, const std::string& kind, RngSpec rng);

/// Two whitespace-separated rows of n spins: left, then right.
BipartiteConfig read_config_file(const std::string& path, int q);

}  // namespace potts
