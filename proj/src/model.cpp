#include "potts/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "potts/error.hpp"

namespace potts {

ModelParams::ModelParams(int q, int n, double beta) : q_(q), n_(n), beta_(beta) {
  if (q < 2 || q > kMaxSpinStates) {
    throw ParameterError("q must lie in [2, " + std::to_string(kMaxSpinStates) + "], got " +
                         std::to_string(q));
  }
  if (n < 1) throw ParameterError("n must be >= 1, got " + std::to_string(n));
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ParameterError("beta must be finite and >= 0, got " + std::to_string(beta));
  }
}

SpinConfig::SpinConfig(int q, std::vector<Spin> spins) : q_(q), spins_(std::move(spins)) {
  if (q < 2 || q > kMaxSpinStates) throw ParameterError("invalid q " + std::to_string(q));
  if (spins_.empty()) throw ParameterError("a spin configuration needs n >= 1 sites");
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    if (spins_[i] >= q) {
      throw ParameterError("spin " + std::to_string(spins_[i]) + " at site " + std::to_string(i) +
                           " is not < q = " + std::to_string(q));
    }
  }
}

SpinConfig SpinConfig::constant(int q, int n, Spin k) {
  if (n < 1) throw ParameterError("n must be >= 1");
  return SpinConfig(q, std::vector<Spin>(static_cast<std::size_t>(n), k));
}

void SpinConfig::assign(std::size_t i, Spin k) { spins_[i] = k; }

BipartiteConfig::BipartiteConfig(SpinConfig left, SpinConfig right)
    : left_(std::move(left)), right_(std::move(right)) {
  if (left_.size() != right_.size()) {
    throw DimensionError("sides have different sizes " + std::to_string(left_.size()) + " and " +
                         std::to_string(right_.size()));
  }
  if (left_.q() != right_.q()) throw DimensionError("sides have different q");
}

ProbVector::ProbVector(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.size() < 2 || w_.size() > static_cast<std::size_t>(kMaxSpinStates)) {
    throw ParameterError("probability vector length must lie in [2, 64], got " +
                         std::to_string(w_.size()));
  }
  double total = 0.0;
  for (double& v : w_) {
    if (!std::isfinite(v) || v < -kSimplexTolerance) {
      throw ParameterError("probability vector has invalid entry " + std::to_string(v));
    }
    if (v < 0.0) v = 0.0;
    total += v;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw ParameterError("probability vector sums to " + std::to_string(total) +
                         ", not 1 within 1e-12");
  }
  if (total != 1.0) {
    for (double& v : w_) v /= total;
  }
}

ProbVector ProbVector::uniform(int q) {
  return ProbVector(std::vector<double>(static_cast<std::size_t>(q), 1.0 / q));
}

ProbVector ProbVector::vertex(int q, int k) {
  if (k < 0 || k >= q) throw ParameterError("vertex index out of range");
  std::vector<double> w(static_cast<std::size_t>(q), 0.0);
  w[static_cast<std::size_t>(k)] = 1.0;
  return ProbVector(std::move(w));
}

LatticePoint::LatticePoint(std::vector<int> counts) : counts_(std::move(counts)), n_(0) {
  if (counts_.size() < 2) throw ParameterError("lattice point needs q >= 2 coordinates");
  for (int c : counts_) {
    if (c < 0) throw ParameterError("lattice point has a negative count");
    n_ += c;
  }
  if (n_ < 1) throw ParameterError("lattice point counts must sum to n >= 1");
}

ProbVector LatticePoint::proportions() const {
  std::vector<double> w(counts_.size());
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    w[k] = static_cast<double>(counts_[k]) / n_;
  }
  return ProbVector(std::move(w));
}

void LatticePoint::transfer(int from, int to) {
  --counts_[static_cast<std::size_t>(from)];
  ++counts_[static_cast<std::size_t>(to)];
}

MagnetizationPair::MagnetizationPair(LatticePoint l, LatticePoint r)
    : left(std::move(l)), right(std::move(r)) {
  if (left.n() != right.n() || left.q() != right.q()) {
    throw DimensionError("magnetization pair built from different (q, n)");
  }
}

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ParameterError("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

LatticePoint magnetization(const SpinConfig& cfg) {
  std::vector<int> counts(static_cast<std::size_t>(cfg.q()), 0);
  for (Spin s : cfg.spins()) ++counts[s];
  return LatticePoint(std::move(counts));
}

MagnetizationPair magnetization(const BipartiteConfig& cfg) {
  return MagnetizationPair(magnetization(cfg.left()), magnetization(cfg.right()));
}

std::int64_t overlap_count(const LatticePoint& left, const LatticePoint& right) {
  if (left.q() != right.q()) throw DimensionError("overlap of lattice points with different q");
  std::int64_t acc = 0;
  for (int k = 0; k < left.q(); ++k) {
    acc += static_cast<std::int64_t>(left[k]) * right[k];
  }
  return acc;
}

Rational hamiltonian_exact(const MagnetizationPair& mags) {
  // -n * sum_k (c_k/n)(d_k/n) = -(sum_k c_k d_k) / n
  return Rational::make(-overlap_count(mags.left, mags.right), mags.left.n());
}

Rational hamiltonian_exact(const BipartiteConfig& cfg) {
  return hamiltonian_exact(magnetization(cfg));
}

double hamiltonian(const MagnetizationPair& mags) {
  return -static_cast<double>(overlap_count(mags.left, mags.right)) / mags.left.n();
}

double hamiltonian(const BipartiteConfig& cfg) { return hamiltonian(magnetization(cfg)); }

double dot(const ProbVector& x, const ProbVector& y) {
  if (x.q() != y.q()) throw DimensionError("inner product of vectors with different q");
  double acc = 0.0;
  for (int k = 0; k < x.q(); ++k) acc += x[k] * y[k];
  return acc;
}

double l1_distance(const ProbVector& x, const ProbVector& y) {
  if (x.q() != y.q()) throw DimensionError("distance between vectors with different q");
  double acc = 0.0;
  for (int k = 0; k < x.q(); ++k) acc += std::abs(x[k] - y[k]);
  return acc;
}

double interaction_h(const ProbVector& x, const ProbVector& y) { return -dot(x, y); }

int config_distance(const SpinConfig& a, const SpinConfig& b) {
  if (a.size() != b.size() || a.q() != b.q()) {
    throw DimensionError("distance between configurations of different (q, n)");
  }
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1 : 0;
  return d;
}

int config_distance(const BipartiteConfig& a, const BipartiteConfig& b) {
  return config_distance(a.left(), b.left()) + config_distance(a.right(), b.right());
}

}  // namespace potts
