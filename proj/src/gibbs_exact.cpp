#include "potts/gibbs_exact.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "potts/error.hpp"
#include "potts/numeric.hpp"

namespace potts {

namespace {

constexpr std::uint64_t kBlockSize = 4096;

struct Digits {
  std::vector<std::uint64_t> place;  // q^j
};

Digits place_values(const ModelParams& p) {
  Digits d;
  d.place.resize(static_cast<std::size_t>(2 * p.n()));
  std::uint64_t v = 1;
  for (auto& x : d.place) {
    x = v;
    v *= static_cast<std::uint64_t>(p.q());
  }
  return d;
}

/// n^2 <L_n(sigma), L_n(tau)> for the configuration with this index.
std::int64_t overlap_of_index(int q, int n, std::uint64_t index, int* left, int* right) {
  std::fill(left, left + q, 0);
  std::fill(right, right + q, 0);
  for (int j = 0; j < n; ++j) {
    ++left[index % static_cast<std::uint64_t>(q)];
    index /= static_cast<std::uint64_t>(q);
  }
  for (int j = 0; j < n; ++j) {
    ++right[index % static_cast<std::uint64_t>(q)];
    index /= static_cast<std::uint64_t>(q);
  }
  std::int64_t acc = 0;
  for (int k = 0; k < q; ++k) acc += static_cast<std::int64_t>(left[k]) * right[k];
  return acc;
}

/// exp(-beta H_n - beta n): the largest term is 1, at aligned configurations.
double shifted_weight(double beta, int n, std::int64_t overlap) {
  const double nn = static_cast<double>(n);
  return std::exp(beta * (static_cast<double>(overlap) - nn * nn) / nn);
}

double log_z_from_shifted(const ModelParams& p, double shifted_sum) {
  return std::log(shifted_sum) + p.beta() * p.n() - 2.0 * p.n() * std::log(static_cast<double>(p.q()));
}

}  // namespace

std::uint64_t config_state_count(const ModelParams& params) {
  unsigned __int128 total = 1;
  for (int j = 0; j < 2 * params.n(); ++j) {
    total *= static_cast<unsigned>(params.q());
    if (total > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(total);
}

void require_enumerable(const ModelParams& params, EnumerationCap cap) {
  const std::uint64_t states = config_state_count(params);
  if (states > cap.max_states) {
    throw FeasibilityError("enumerating q^{2n} = " + std::to_string(states) + " configurations for q=" +
                               std::to_string(params.q()) + ", n=" + std::to_string(params.n()) +
                               " exceeds the enumeration cap",
                           cap.max_states);
  }
}

BipartiteConfig decode_config(const ModelParams& params, std::uint64_t index) {
  const int q = params.q();
  const int n = params.n();
  std::vector<Spin> left(static_cast<std::size_t>(n));
  std::vector<Spin> right(static_cast<std::size_t>(n));
  for (auto& s : left) {
    s = static_cast<Spin>(index % static_cast<std::uint64_t>(q));
    index /= static_cast<std::uint64_t>(q);
  }
  for (auto& s : right) {
    s = static_cast<Spin>(index % static_cast<std::uint64_t>(q));
    index /= static_cast<std::uint64_t>(q);
  }
  return {SpinConfig(q, std::move(left)), SpinConfig(q, std::move(right))};
}

std::uint64_t encode_config(const BipartiteConfig& cfg) {
  const auto q = static_cast<std::uint64_t>(cfg.q());
  std::uint64_t index = 0;
  std::uint64_t place = 1;
  for (Spin s : cfg.left().spins()) {
    index += s * place;
    place *= q;
  }
  for (Spin s : cfg.right().spins()) {
    index += s * place;
    place *= q;
  }
  return index;
}

double log_partition_function(const ModelParams& params, EnumerationCap cap) {
  require_enumerable(params, cap);
  const std::uint64_t states = config_state_count(params);
  const std::uint64_t blocks = (states + kBlockSize - 1) / kBlockSize;
  std::vector<double> block_sums(static_cast<std::size_t>(blocks), 0.0);
  const int q = params.q();
  const int n = params.n();
  const double beta = params.beta();

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
    int left[kMaxSpinStates];
    int right[kMaxSpinStates];
    const std::uint64_t begin = static_cast<std::uint64_t>(b) * kBlockSize;
    const std::uint64_t end = std::min(states, begin + kBlockSize);
    double acc = 0.0;
    for (std::uint64_t i = begin; i < end; ++i) {
      acc += shifted_weight(beta, n, overlap_of_index(q, n, i, left, right));
    }
    block_sums[static_cast<std::size_t>(b)] = acc;
  }
  return log_z_from_shifted(params, pairwise_sum(std::move(block_sums)));
}

double partition_function(const ModelParams& params, EnumerationCap cap) {
  return std::exp(log_partition_function(params, cap));
}

namespace serial {

double log_partition_function(const ModelParams& params, EnumerationCap cap) {
  require_enumerable(params, cap);
  const std::uint64_t states = config_state_count(params);
  int left[kMaxSpinStates];
  int right[kMaxSpinStates];
  double acc = 0.0;
  for (std::uint64_t i = 0; i < states; ++i) {
    acc += shifted_weight(params.beta(), params.n(), overlap_of_index(params.q(), params.n(), i, left, right));
  }
  return log_z_from_shifted(params, acc);
}

}  // namespace serial

ExactEnsemble enumerate_ensemble(const ModelParams& params, EnumerationCap cap) {
  require_enumerable(params, cap);
  const std::uint64_t states = config_state_count(params);
  std::vector<double> weights(static_cast<std::size_t>(states));
  const int q = params.q();
  const int n = params.n();

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(states); ++i) {
    int left[kMaxSpinStates];
    int right[kMaxSpinStates];
    weights[static_cast<std::size_t>(i)] =
        shifted_weight(params.beta(), n, overlap_of_index(q, n, static_cast<std::uint64_t>(i), left, right));
  }
  const double log_z = log_partition_function(params, cap);
  // prob = exp(-beta H) q^{-2n} / Z = shifted * exp(beta n) q^{-2n} / Z
  const double scale = std::exp(params.beta() * n - 2.0 * n * std::log(static_cast<double>(q)) - log_z);
  for (double& w : weights) w *= scale;
  return ExactEnsemble(params, log_z, std::move(weights));
}

double gibbs_prob(const ExactEnsemble& ens, const BipartiteConfig& cfg) {
  if (cfg.q() != ens.params().q() || cfg.n() != ens.params().n()) {
    throw DimensionError("configuration does not match the ensemble's (q, n)");
  }
  const auto& p = ens.params();
  const double minus_beta_h = -p.beta() * hamiltonian_exact(cfg).to_double();
  return std::exp(minus_beta_h - 2.0 * p.n() * std::log(static_cast<double>(p.q())) - ens.log_z());
}

ProbVector conditional_update_exact(const ModelParams& params, const BipartiteConfig& cfg, Side side,
                                    std::size_t vertex) {
  if (cfg.q() != params.q() || cfg.n() != params.n()) {
    throw DimensionError("configuration does not match the model's (q, n)");
  }
  if (vertex >= static_cast<std::size_t>(params.n())) throw ParameterError("vertex index out of range");
  const int q = params.q();
  const MagnetizationPair base = magnetization(cfg);
  const int current = cfg.side(side)[vertex];

  // -beta H_n(candidate) = beta * overlap(candidate) / n; overlaps are exact integers.
  std::vector<std::int64_t> overlaps(static_cast<std::size_t>(q));
  std::int64_t top = std::numeric_limits<std::int64_t>::min();
  for (int k = 0; k < q; ++k) {
    MagnetizationPair candidate = base;
    candidate.side(side).transfer(current, k);
    const Rational h = hamiltonian_exact(candidate);
    overlaps[static_cast<std::size_t>(k)] = -h.num * (params.n() / h.den);
    top = std::max(top, overlaps[static_cast<std::size_t>(k)]);
  }
  std::vector<double> w(static_cast<std::size_t>(q));
  double total = 0.0;
  for (int k = 0; k < q; ++k) {
    const auto diff = static_cast<double>(overlaps[static_cast<std::size_t>(k)] - top);
    w[static_cast<std::size_t>(k)] = std::exp(params.beta() * diff / params.n());
    total += w[static_cast<std::size_t>(k)];
  }
  for (double& v : w) v /= total;
  return ProbVector(std::move(w));
}

SparseKernel exact_glauber_kernel(const ModelParams& params, EnumerationCap cap) {
  require_enumerable(params, cap);
  const std::uint64_t states = config_state_count(params);
  const Digits digits = place_values(params);
  const int q = params.q();
  const int n = params.n();
  const double pick = 1.0 / (2.0 * n);

  SparseKernel::Builder builder(static_cast<std::size_t>(states));
  for (std::uint64_t x = 0; x < states; ++x) {
    const BipartiteConfig cfg = decode_config(params, x);
    std::vector<std::pair<std::size_t, double>> row;
    row.reserve(static_cast<std::size_t>(2 * n * q));
    for (int v = 0; v < 2 * n; ++v) {
      const Side side = v < n ? Side::left : Side::right;
      const auto site = static_cast<std::size_t>(v < n ? v : v - n);
      const ProbVector p = conditional_update_exact(params, cfg, side, site);
      const int current = cfg.side(side)[site];
      for (int k = 0; k < q; ++k) {
        const std::uint64_t y = x - static_cast<std::uint64_t>(current) * digits.place[static_cast<std::size_t>(v)] +
                                static_cast<std::uint64_t>(k) * digits.place[static_cast<std::size_t>(v)];
        row.emplace_back(static_cast<std::size_t>(y), pick * p[k]);
      }
    }
    builder.add_row(std::move(row));
  }
  return std::move(builder).build();
}

MagnetizationLaw magnetization_pushforward(const ExactEnsemble& ens) {
  const auto& p = ens.params();
  MagnetizationLaw law{CompositionIndex(p.q(), p.n()), {}};
  const std::size_t m = law.lattice.size();
  law.probs.assign(m * m, 0.0);
  std::vector<int> left(static_cast<std::size_t>(p.q()));
  std::vector<int> right(static_cast<std::size_t>(p.q()));
  for (std::uint64_t i = 0; i < ens.probs().size(); ++i) {
    overlap_of_index(p.q(), p.n(), i, left.data(), right.data());
    law.probs[law.lattice.rank(left) * m + law.lattice.rank(right)] += ens.prob(i);
  }
  return law;
}

EquilibriumSampler::EquilibriumSampler(const ModelParams& params)
    : params_(params), lattice_(params.q(), params.n()) {
  const int q = params.q();
  const int n = params.n();
  const double beta = params.beta();
  std::vector<double> logw(lattice_.size());
  std::vector<double> z(static_cast<std::size_t>(q));
  for (std::size_t i = 0; i < lattice_.size(); ++i) {
    auto c = lattice_.counts(i);
    double lw = std::lgamma(n + 1.0);
    for (int k = 0; k < q; ++k) {
      lw -= std::lgamma(c[static_cast<std::size_t>(k)] + 1.0);
      z[static_cast<std::size_t>(k)] = beta * c[static_cast<std::size_t>(k)] / n;
    }
    logw[i] = lw + n * log_sum_exp(z);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  marginal_.resize(logw.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    marginal_[i] = std::exp(logw[i] - top);
    total += marginal_[i];
  }
  cdf_.resize(marginal_.size());
  double run = 0.0;
  for (std::size_t i = 0; i < marginal_.size(); ++i) {
    marginal_[i] /= total;
    run += marginal_[i];
    cdf_[i] = run;
  }
}

BipartiteConfig EquilibriumSampler::sample(RngStream& rng) const {
  const int q = params_.q();
  const int n = params_.n();
  const double u = rng.uniform() * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  auto counts = lattice_.counts(idx);

  std::vector<Spin> left;
  left.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < q; ++k) left.insert(left.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]), static_cast<Spin>(k));
  for (std::size_t i = left.size(); i > 1; --i) {
    std::swap(left[i - 1], left[rng.index(i)]);
  }

  std::vector<double> z(static_cast<std::size_t>(q));
  std::vector<double> g(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) z[static_cast<std::size_t>(k)] = static_cast<double>(counts[static_cast<std::size_t>(k)]) / n;
  softmax(z, params_.beta(), g);
  std::vector<Spin> right(static_cast<std::size_t>(n));
  for (auto& s : right) {
    double v = rng.uniform();
    int k = 0;
    while (k + 1 < q && v >= g[static_cast<std::size_t>(k)]) {
      v -= g[static_cast<std::size_t>(k)];
      ++k;
    }
    s = static_cast<Spin>(k);
  }
  return {SpinConfig(q, std::move(left)), SpinConfig(q, std::move(right))};
}

}  // namespace potts
