#pragma once

// Brute-force ground truth for small K_{n,n}: partition function, Gibbs
// probabilities, the exact heat-bath kernel and the exact law of the
// magnetization pair, all by enumerating the q^{2n} configurations.
//
// Configurations are indexed in mixed radix q with 2n digits, least
// significant first: digits 0..n-1 are the left spins, n..2n-1 the right.

#include <cstdint>
#include <vector>

#include "potts/kernel.hpp"
#include "potts/lattice.hpp"
#include "potts/model.hpp"
#include "potts/rng.hpp"

namespace potts {

struct EnumerationCap {
  std::uint64_t max_states = 10'000'000;
};

/// q^{2n}, saturating at UINT64_MAX.
std::uint64_t config_state_count(const ModelParams& params);

/// Throws FeasibilityError naming the cap when q^{2n} exceeds it.
void require_enumerable(const ModelParams& params, EnumerationCap cap);

BipartiteConfig decode_config(const ModelParams& params, std::uint64_t index);
std::uint64_t encode_config(const BipartiteConfig& cfg);

/// log Z_{n,n}(beta) with Z = q^{-2n} sum exp(-beta H_n).  Summed over fixed
/// blocks of the state index (OpenMP across blocks) and combined by a
/// pairwise tree, so the value is bit-identical for any thread count.
double log_partition_function(const ModelParams& params, EnumerationCap cap = {});
double partition_function(const ModelParams& params, EnumerationCap cap = {});

namespace serial {
/// Single running sum over all states; the reference for the blocked version.
double log_partition_function(const ModelParams& params, EnumerationCap cap = {});
}  // namespace serial

class ExactEnsemble {
 public:
  ExactEnsemble(ModelParams params, double log_z, std::vector<double> probs)
      : params_(params), log_z_(log_z), probs_(std::move(probs)) {}

  const ModelParams& params() const noexcept { return params_; }
  double log_z() const noexcept { return log_z_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  double prob(std::uint64_t index) const { return probs_[index]; }

 private:
  ModelParams params_;
  double log_z_;
  std::vector<double> probs_;
};

ExactEnsemble enumerate_ensemble(const ModelParams& params, EnumerationCap cap = {});

/// exp(-beta H_n(cfg)) / (q^{2n} Z).
double gibbs_prob(const ExactEnsemble& ens, const BipartiteConfig& cfg);

/// Law of the new spin at `vertex` on `side` under the Gibbs measure
/// conditioned on every other spin, computed from exact Hamiltonian values
/// of the q candidate configurations.
ProbVector conditional_update_exact(const ModelParams& params, const BipartiteConfig& cfg,
                                    Side side, std::size_t vertex);

/// Heat-bath kernel: pick one of the 2n vertices uniformly, resample it from
/// conditional_update_exact.
SparseKernel exact_glauber_kernel(const ModelParams& params, EnumerationCap cap = {});

/// Exact law of (L_n(sigma), L_n(tau)); pair index = rank(left) * |P_n| + rank(right).
struct MagnetizationLaw {
  CompositionIndex lattice;
  std::vector<double> probs;

  double prob(const LatticePoint& left, const LatticePoint& right) const {
    return probs[lattice.rank(left) * lattice.size() + lattice.rank(right)];
  }
};

MagnetizationLaw magnetization_pushforward(const ExactEnsemble& ens);

/// Exact Gibbs sampler for any n.  The left magnetization has marginal
/// proportional to multinomial(n; c) * (sum_k exp(beta c_k / n))^n; given the
/// left side, right spins are iid with law g(L_n(sigma)); spins within a side
/// are exchangeable.
class EquilibriumSampler {
 public:
  explicit EquilibriumSampler(const ModelParams& params);

  BipartiteConfig sample(RngStream& rng) const;
  const std::vector<double>& left_marginal() const noexcept { return marginal_; }
  const CompositionIndex& lattice() const noexcept { return lattice_; }

 private:
  ModelParams params_;
  CompositionIndex lattice_;
  std::vector<double> marginal_;
  std::vector<double> cdf_;
};

}  // namespace potts
