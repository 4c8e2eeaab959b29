#pragma once

// Core value types of the q-state Potts model on the complete bipartite graph K_{n,n}.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace potts {

using Spin = std::uint8_t;

/// Spins are 0-based indices; q is bounded so a spin fits in one byte and
/// per-site weights fit on the stack.
inline constexpr int kMaxSpinStates = 64;

/// Tolerance on the total mass of a floating probability vector.
inline constexpr double kSimplexTolerance = 1e-12;

enum class Side { left, right };

inline Side opposite(Side s) { return s == Side::left ? Side::right : Side::left; }

/// Ensemble parameters (q, n, beta).  q >= 2, n >= 1, beta >= 0.
class ModelParams {
 public:
  ModelParams(int q, int n, double beta);

  int q() const noexcept { return q_; }
  int n() const noexcept { return n_; }
  double beta() const noexcept { return beta_; }

  ModelParams with_beta(double beta) const { return {q_, n_, beta}; }
  ModelParams with_n(int n) const { return {q_, n, beta_}; }

  bool operator==(const ModelParams&) const = default;

 private:
  int q_;
  int n_;
  double beta_;
};

/// One side of the graph: n spins with values in {0, ..., q-1}.
class SpinConfig {
 public:
  SpinConfig(int q, std::vector<Spin> spins);

  /// Every spin equal to k.
  static SpinConfig constant(int q, int n, Spin k);

  int q() const noexcept { return q_; }
  std::size_t size() const noexcept { return spins_.size(); }
  Spin operator[](std::size_t i) const { return spins_[i]; }
  std::span<const Spin> spins() const noexcept { return spins_; }

  /// Single-owner in-place update used by the Markov chains.
  void assign(std::size_t i, Spin k);

  bool operator==(const SpinConfig&) const = default;

 private:
  int q_;
  std::vector<Spin> spins_;
};

/// A microstate (sigma, tau) of K_{n,n}.
class BipartiteConfig {
 public:
  BipartiteConfig(SpinConfig left, SpinConfig right);

  static BipartiteConfig constant(int q, int n, Spin k) {
    return {SpinConfig::constant(q, n, k), SpinConfig::constant(q, n, k)};
  }

  int q() const noexcept { return left_.q(); }
  int n() const noexcept { return static_cast<int>(left_.size()); }

  const SpinConfig& left() const noexcept { return left_; }
  const SpinConfig& right() const noexcept { return right_; }
  const SpinConfig& side(Side s) const noexcept { return s == Side::left ? left_ : right_; }

  void assign(Side s, std::size_t i, Spin k) {
    (s == Side::left ? left_ : right_).assign(i, k);
  }

  bool operator==(const BipartiteConfig&) const = default;

 private:
  SpinConfig left_;
  SpinConfig right_;
};

/// A point of the probability simplex P_q.  Construction rejects negative
/// entries and totals farther than kSimplexTolerance from 1, and renormalizes
/// anything within it.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> weights);

  /// rho = (1/q, ..., 1/q).
  static ProbVector uniform(int q);
  /// The basis vector e^{k+1} (0-based k).
  static ProbVector vertex(int q, int k);

  int q() const noexcept { return static_cast<int>(w_.size()); }
  double operator[](int k) const { return w_[static_cast<std::size_t>(k)]; }
  std::span<const double> weights() const noexcept { return w_; }

  bool operator==(const ProbVector&) const = default;

 private:
  std::vector<double> w_;
};

/// A point of the lattice simplex P_n, stored as integer counts summing to n.
class LatticePoint {
 public:
  explicit LatticePoint(std::vector<int> counts);

  int q() const noexcept { return static_cast<int>(counts_.size()); }
  int n() const noexcept { return n_; }
  int operator[](int k) const { return counts_[static_cast<std::size_t>(k)]; }
  std::span<const int> counts() const noexcept { return counts_; }

  /// counts / n.
  ProbVector proportions() const;

  /// Move one spin from value `from` to value `to`.
  void transfer(int from, int to);

  bool operator==(const LatticePoint&) const = default;

 private:
  std::vector<int> counts_;
  int n_;
};

struct MagnetizationPair {
  MagnetizationPair(LatticePoint left, LatticePoint right);

  LatticePoint left;
  LatticePoint right;

  const LatticePoint& side(Side s) const { return s == Side::left ? left : right; }
  LatticePoint& side(Side s) { return s == Side::left ? left : right; }

  bool operator==(const MagnetizationPair&) const = default;
};

/// Reduced fraction num/den with den > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

LatticePoint magnetization(const SpinConfig& cfg);
MagnetizationPair magnetization(const BipartiteConfig& cfg);

/// sum_k counts_left[k] * counts_right[k], i.e. n^2 <L_n(sigma), L_n(tau)>.
std::int64_t overlap_count(const LatticePoint& left, const LatticePoint& right);

/// H_n(sigma, tau) = -n <L_n(sigma), L_n(tau)>, evaluated exactly.
Rational hamiltonian_exact(const BipartiteConfig& cfg);
Rational hamiltonian_exact(const MagnetizationPair& mags);

/// Floating form of H_n for the hot path.
double hamiltonian(const BipartiteConfig& cfg);
double hamiltonian(const MagnetizationPair& mags);

double dot(const ProbVector& x, const ProbVector& y);
double l1_distance(const ProbVector& x, const ProbVector& y);

/// H(x, y) = -<x, y>.
double interaction_h(const ProbVector& x, const ProbVector& y);

/// Number of disagreeing sites over both sides.
int config_distance(const BipartiteConfig& a, const BipartiteConfig& b);
int config_distance(const SpinConfig& a, const SpinConfig& b);

}  // namespace potts
