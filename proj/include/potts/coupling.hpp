#pragma once

// Greedy coupling of two Glauber chains: both update the same vertex, and the
// new spins agree with the largest possible probability.

#include <cstdint>
#include <optional>
#include <vector>

#include "potts/gibbs_exact.hpp"
#include "potts/glauber.hpp"
#include "potts/model.hpp"
#include "potts/rng.hpp"

namespace potts {

/// Joint law of the two new spins; p[k * q + m] = P(x gets k, y gets m).
struct JointDistribution {
  int q = 0;
  std::vector<double> p;

  double at(int k, int m) const { return p[static_cast<std::size_t>(k * q + m)]; }
  double mismatch() const;
  std::vector<double> marginal_x() const;
  std::vector<double> marginal_y() const;
};

/// Diagonal min(px_k, py_k); off-diagonal (px_k - min_k)(py_m - min_m) / (1 - sum min).
/// Identical inputs give the identity coupling.
JointDistribution coupled_update_dist(const ProbVector& px, const ProbVector& py);

/// (1/2) sum_k |px_k - py_k|.
double total_variation(std::span<const double> px, std::span<const double> py);

struct CouplingState {
  ChainState x;
  ChainState y;
  int distance;
  std::optional<std::uint64_t> coalesced_at;

  CouplingState(BipartiteConfig x0, BipartiteConfig y0);
  std::uint64_t step() const noexcept { return x.step; }
};

/// Exact per-side mismatch probabilities and their first-order forms.
struct Kappa {
  double left = 0.0;   // TV(g(L(tau)), g(L(tau'))): a left vertex updates differently
  double right = 0.0;  // TV(g(L(sigma)), g(L(sigma')))
  double left_linear = 0.0;   // (1/2) sum_k |<grad g_k(L(tau)), L(tau') - L(tau)>|
  double right_linear = 0.0;
  double total() const { return left + right; }
};

Kappa kappa(const ModelParams& params, const BipartiteConfig& a, const BipartiteConfig& b);

/// E[d(X_1, Y_1)] by enumerating the 2n vertex choices and the joint update law at each.
double one_step_expected_distance(const ModelParams& params, const BipartiteConfig& a,
                                  const BipartiteConfig& b);

/// Row of the coupled kernel from the pair (a, b) over full configuration indices.
struct CoupledTransition {
  std::uint64_t x;
  std::uint64_t y;
  double prob;
};
std::vector<CoupledTransition> coupled_kernel_row(const ModelParams& params, const BipartiteConfig& a,
                                                  const BipartiteConfig& b);

struct DistanceSample {
  std::uint64_t step;
  int distance;
};

struct CouplingRun {
  std::optional<std::uint64_t> coupling_time;
  bool timed_out = false;
  std::vector<DistanceSample> trace;
};

class GreedyCoupling {
 public:
  GreedyCoupling(ModelParams params, RngSpec rng, BipartiteConfig x0, BipartiteConfig y0);

  const CouplingState& state() const noexcept { return state_; }
  const ModelParams& params() const noexcept { return params_; }

  void step();

  /// Runs until coalescence or t_max total steps.  trace_stride = 0 disables the
  /// trace; otherwise the distance is recorded every trace_stride steps and at the end.
  CouplingRun run(std::uint64_t t_max, std::uint64_t trace_stride = 0);

 private:
  ModelParams params_;
  CounterRng rng_;
  CouplingState state_;
  std::vector<double> table_;
};

struct ReplicaResult {
  std::uint32_t stream = 0;
  std::optional<std::uint64_t> coupling_time;
  bool timed_out = false;
};

/// One coupling per replica r with RngSpec{seed, r}; OpenMP across replicas.
std::vector<ReplicaResult> run_coupling_replicas(const ModelParams& params, const BipartiteConfig& x0,
                                                 const BipartiteConfig& y0, std::uint64_t t_max,
                                                 std::uint64_t seed, int replicas);

/// Mean distance E[d(X_t, Y_t)] at t = 0, stride, 2 stride, ..., with Y_0 drawn
/// from the exact equilibrium sampler per replica.  OpenMP across replicas.
std::vector<double> mean_distance_from_equilibrium(const ModelParams& params, const BipartiteConfig& x0,
                                                   std::uint64_t t_max, std::uint64_t stride,
                                                   std::uint64_t seed, int replicas);

struct OneStepSlack {
  double c_min = 0.0;          // smallest c with E d(X_1,Y_1) <= (1 - 1/2n) d + kappa_linear / 2 + c eps^2
  double exact_excess = 0.0;   // max of E d(X_1,Y_1) - (1 - 1/2n) d - kappa / 2 with exact kappa
  int pairs = 0;               // pairs with eps > 0
  int skipped = 0;             // pairs whose magnetizations coincide
};

/// Random pairs: a uniform, b = a after k uniform site resamples, k uniform in [1, 2n].
/// eps = |L(sigma) - L(sigma')|_1 + |L(tau) - L(tau')|_1.  Pair i uses RngSpec{seed, i}.
OneStepSlack one_step_slack(const ModelParams& params, int pairs, std::uint64_t seed);

namespace serial {
std::vector<ReplicaResult> run_coupling_replicas(const ModelParams& params, const BipartiteConfig& x0,
                                                 const BipartiteConfig& y0, std::uint64_t t_max,
                                                 std::uint64_t seed, int replicas);
}  // namespace serial

}  // namespace potts
