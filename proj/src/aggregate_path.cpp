#include "potts/aggregate_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>

#include "potts/error.hpp"
#include "potts/lattice.hpp"
#include "potts/numeric.hpp"
#include "potts/rng.hpp"

namespace potts {

namespace {

// Jacobian of g at z (row-major), from the softmax of beta z.
void jacobian_into(std::span<const double> z, double beta, std::span<double> g, std::span<double> jac) {
  softmax(z, beta, g);
  const std::size_t q = z.size();
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t j = 0; j < q; ++j) jac[k * q + j] = beta * g[k] * ((k == j ? 1.0 : 0.0) - g[j]);
}

// sum_k |<delta, grad g_k(z)>|
double variation_density(std::span<const double> z, std::span<const double> delta, double beta) {
  const std::size_t q = z.size();
  double g[kMaxSpinStates];
  std::vector<double> jac(q * q);
  jacobian_into(z, beta, {g, q}, jac);
  double acc = 0.0;
  for (std::size_t k = 0; k < q; ++k) {
    double d = 0.0;
    for (std::size_t j = 0; j < q; ++j) d += jac[k * q + j] * delta[j];
    acc += std::abs(d);
  }
  return acc;
}

std::vector<double> proportions_of(const LatticePoint& p) {
  std::vector<double> out(static_cast<std::size_t>(p.q()));
  for (int k = 0; k < p.q(); ++k) out[static_cast<std::size_t>(k)] = static_cast<double>(p[k]) / p.n();
  return out;
}

double l1(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
  return acc;
}

struct Flip {
  double time;
  int side;  // 0 left, 1 right
  int from;
  int to;
  std::size_t site;
};

}  // namespace

MonotonePath build_monotone_path(const BipartiteConfig& a, const BipartiteConfig& b, double epsilon) {
  if (a.q() != b.q() || a.n() != b.n()) throw DimensionError("path endpoints have different (q, n)");
  if (!(epsilon > 0.0 && epsilon < 2.0)) throw ParameterError("epsilon must lie in (0, 2)");
  const int n = a.n();
  const int q = a.q();
  const double half = epsilon * n / 2.0;
  const int j = static_cast<int>(std::ceil(half - 1e-9));
  if (j < 1 || !(j < epsilon * n - 1e-9)) {
    throw ParameterError("no whole number of flips j with 2j/n in [eps, 2 eps) for n=" + std::to_string(n) +
                         ", eps=" + std::to_string(epsilon));
  }

  // Per side, the i-th flip of type (from -> to) sits at time (i + 1/2) / F_type
  // on the straight magnetization path; sorting by time keeps each side's
  // magnetization next to that line.
  std::vector<Flip> per_side[2];
  for (int s = 0; s < 2; ++s) {
    const Side side = s == 0 ? Side::left : Side::right;
    const SpinConfig& sa = a.side(side);
    const SpinConfig& sb = b.side(side);
    const LatticePoint ca = magnetization(sa);
    const LatticePoint cb = magnetization(sb);
    std::vector<int> type_total(static_cast<std::size_t>(q * q), 0);
    for (std::size_t i = 0; i < sa.size(); ++i) {
      const int from = sa[i];
      const int to = sb[i];
      if (from == to) continue;
      if (!(ca[from] > cb[from] && ca[to] < cb[to])) {
        throw ParameterError(std::string("no monotone geodesic: ") + (s == 0 ? "left" : "right") + " site " +
                             std::to_string(i) + " flips " + std::to_string(from) + "->" + std::to_string(to) +
                             " against the net change of the magnetization");
      }
      ++type_total[static_cast<std::size_t>(from * q + to)];
    }
    std::vector<int> seen(static_cast<std::size_t>(q * q), 0);
    for (std::size_t i = 0; i < sa.size(); ++i) {
      const int from = sa[i];
      const int to = sb[i];
      if (from == to) continue;
      const auto t = static_cast<std::size_t>(from * q + to);
      const double time = (seen[t] + 0.5) / type_total[t];
      ++seen[t];
      per_side[s].push_back({time, s, from, to, i});
    }
    std::sort(per_side[s].begin(), per_side[s].end(), [](const Flip& x, const Flip& y) {
      return std::tie(x.time, x.from, x.to, x.site) < std::tie(y.time, y.from, y.to, y.site);
    });
  }

  MonotonePath path;
  path.epsilon = epsilon;
  path.flips_per_link = j;
  path.waypoints.push_back(a);
  BipartiteConfig cur = a;
  // Each link takes j flips from the side that is further behind, so the two
  // sides advance proportionally at link resolution.
  std::size_t done[2] = {0, 0};
  const std::size_t total[2] = {per_side[0].size(), per_side[1].size()};
  const auto progress = [&](int s) {
    return total[s] == 0 ? 1.0 : static_cast<double>(done[s]) / static_cast<double>(total[s]);
  };
  while (done[0] < total[0] || done[1] < total[1]) {
    int s = progress(0) <= progress(1) ? 0 : 1;
    if (done[s] == total[s]) s = 1 - s;
    for (int f = 0; f < j; ++f) {
      if (done[s] == total[s]) s = 1 - s;
      if (done[s] == total[s]) break;
      const Flip& fl = per_side[s][done[s]++];
      cur.assign(s == 0 ? Side::left : Side::right, fl.site, static_cast<Spin>(fl.to));
    }
    path.waypoints.push_back(cur);
  }
  return path;
}

SpinConfig nearest_config_with_magnetization(const SpinConfig& from, const LatticePoint& target) {
  if (target.q() != from.q() || static_cast<std::size_t>(target.n()) != from.size()) {
    throw DimensionError("target magnetization does not match the configuration");
  }
  const int q = from.q();
  const LatticePoint cur = magnetization(from);
  std::vector<int> surplus(static_cast<std::size_t>(q));
  std::vector<int> deficit(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) {
    surplus[static_cast<std::size_t>(k)] = std::max(cur[k] - target[k], 0);
    deficit[static_cast<std::size_t>(k)] = std::max(target[k] - cur[k], 0);
  }
  std::vector<Spin> spins(from.spins().begin(), from.spins().end());
  int m = 0;
  for (auto& s : spins) {
    if (surplus[s] == 0) continue;
    while (deficit[static_cast<std::size_t>(m)] == 0) ++m;
    --surplus[s];
    --deficit[static_cast<std::size_t>(m)];
    s = static_cast<Spin>(m);
  }
  return SpinConfig(q, std::move(spins));
}

PathAudit audit(const MonotonePath& path) {
  PathAudit r;
  const auto& w = path.waypoints;
  if (w.empty()) return r;
  const double eps = path.epsilon;
  const double tol = 1e-12;

  int link_sum = 0;
  for (std::size_t i = 1; i < w.size(); ++i) link_sum += config_distance(w[i - 1], w[i]);
  r.additive = link_sum == config_distance(w.front(), w.back());

  r.monotone = true;
  for (int s = 0; s < 2 && r.monotone; ++s) {
    const Side side = s == 0 ? Side::left : Side::right;
    const LatticePoint first = magnetization(w.front().side(side));
    const LatticePoint last = magnetization(w.back().side(side));
    LatticePoint prev = first;
    for (std::size_t i = 1; i < w.size() && r.monotone; ++i) {
      const LatticePoint now = magnetization(w[i].side(side));
      for (int k = 0; k < now.q(); ++k) {
        const int dir = last[k] - first[k];
        const int step = now[k] - prev[k];
        if ((dir >= 0 && step < 0) || (dir <= 0 && step > 0)) r.monotone = false;
      }
      prev = now;
    }
  }

  r.spacing = true;
  r.min_increment = std::numeric_limits<double>::infinity();
  r.max_increment = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const MagnetizationPair m0 = magnetization(w[i - 1]);
    const MagnetizationPair m1 = magnetization(w[i]);
    const double inc = l1(proportions_of(m0.left), proportions_of(m1.left)) +
                       l1(proportions_of(m0.right), proportions_of(m1.right));
    const bool last = i + 1 == w.size();
    if (last && inc < eps - tol) {
      ++r.short_links;
      continue;
    }
    if (inc < eps - tol || inc >= 2.0 * eps - tol) r.spacing = false;
    r.min_increment = std::min(r.min_increment, inc);
    r.max_increment = std::max(r.max_increment, inc);
  }
  if (!std::isfinite(r.min_increment)) r.min_increment = 0.0;
  return r;
}

AggregateVariation discrete_aggregate_variation(const MonotonePath& path, double beta) {
  AggregateVariation out;
  const auto& w = path.waypoints;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const MagnetizationPair m0 = magnetization(w[i - 1]);
    const MagnetizationPair m1 = magnetization(w[i]);
    for (int s = 0; s < 2; ++s) {
      const std::vector<double> z0 = proportions_of(s == 0 ? m0.left : m0.right);
      const std::vector<double> z1 = proportions_of(s == 0 ? m1.left : m1.right);
      std::vector<double> delta(z0.size());
      for (std::size_t k = 0; k < z0.size(); ++k) delta[k] = z1[k] - z0[k];
      (s == 0 ? out.s1 : out.s2) += variation_density(z0, delta, beta);
    }
  }
  return out;
}

double continuous_aggregate_variation(const ProbVector& a, const ProbVector& b, double beta, int quad_points,
                                      double rel_tol) {
  if (a.q() != b.q()) throw DimensionError("continuous_aggregate_variation: different q");
  if (quad_points < 2) throw ParameterError("quad_points must be >= 2");
  const auto q = static_cast<std::size_t>(a.q());
  std::vector<double> delta(q);
  for (std::size_t k = 0; k < q; ++k) delta[k] = b[static_cast<int>(k)] - a[static_cast<int>(k)];
  if (beta == 0.0 || l1(a.weights(), b.weights()) == 0.0) return 0.0;
  std::vector<double> x(q);
  const auto f = [&](double t) {
    for (std::size_t k = 0; k < q; ++k) x[k] = (1.0 - t) * a[static_cast<int>(k)] + t * b[static_cast<int>(k)];
    return variation_density(x, delta, beta);
  };
  const QuadratureResult r = adaptive_simpson(f, 0.0, 1.0, quad_points, rel_tol);
  if (!r.converged) {
    throw ConvergenceError("aggregate g-variation: quadrature missed its tolerance at maximum depth",
                           {"estimate " + std::to_string(r.value) + " +- " + std::to_string(r.error_estimate)});
  }
  return r.value;
}

double contraction_ratio(const ProbVector& x_start, const ProbVector& y_start, const ProbVector& x_end,
                         const ProbVector& y_end, double beta, int quad_points) {
  const double denom = l1_distance(x_start, x_end) + l1_distance(y_start, y_end);
  if (denom == 0.0) throw ParameterError("contraction_ratio: endpoints coincide");
  return (continuous_aggregate_variation(x_start, x_end, beta, quad_points) +
          continuous_aggregate_variation(y_start, y_end, beta, quad_points)) /
         denom;
}

namespace {

double lipschitz_sample(double beta, int q, double radius, std::uint64_t seed, std::uint32_t i) {
  RngStream rng({seed, i}, lanes::sampling);
  const auto uq = static_cast<std::size_t>(q);
  double dir[kMaxSpinStates];
  double norm = 0.0;
  while (norm == 0.0) {
    double mean = 0.0;
    for (std::size_t k = 0; k < uq; ++k) mean += (dir[k] = 2.0 * rng.uniform() - 1.0);
    mean /= q;
    norm = 0.0;
    for (std::size_t k = 0; k < uq; ++k) norm += std::abs(dir[k] -= mean);
  }
  const double r = radius * (1.0 - rng.uniform());
  double x[kMaxSpinStates];
  double g[kMaxSpinStates];
  for (std::size_t k = 0; k < uq; ++k) x[k] = 1.0 / q + r * dir[k] / norm;
  softmax({x, uq}, beta, {g, uq});
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < uq; ++k) {
    num += std::abs(g[k] - 1.0 / q);
    den += std::abs(x[k] - 1.0 / q);
  }
  return den > 0.0 ? num / den : 0.0;
}

void check_lipschitz_args(int q, double radius, int samples) {
  if (q < 2 || q > kMaxSpinStates) throw ParameterError("lipschitz_ratio_near_rho: bad q");
  if (!(radius > 0.0) || !(radius < 2.0 / q)) throw ParameterError("radius must lie in (0, 2/q)");
  if (samples < 1) throw ParameterError("samples must be >= 1");
}

}  // namespace

double lipschitz_ratio_near_rho(double beta, int q, double radius, int samples, std::uint64_t seed) {
  check_lipschitz_args(q, radius, samples);
  double best = 0.0;
#pragma omp parallel for reduction(max : best)
  for (int i = 0; i < samples; ++i) {
    best = std::max(best, lipschitz_sample(beta, q, radius, seed, static_cast<std::uint32_t>(i)));
  }
  return best;
}

namespace serial {
double lipschitz_ratio_near_rho(double beta, int q, double radius, int samples, std::uint64_t seed) {
  check_lipschitz_args(q, radius, samples);
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    best = std::max(best, lipschitz_sample(beta, q, radius, seed, static_cast<std::uint32_t>(i)));
  }
  return best;
}
}  // namespace serial

namespace {

ContractionCase contraction_sample(double beta, int q, double radius, std::uint64_t seed, std::uint32_t i) {
  RngStream rng({seed, i}, lanes::sampling);
  const auto uq = static_cast<std::size_t>(q);
  const auto simplex_point = [&] {
    std::vector<double> w(uq);
    double t = 0.0;
    for (auto& v : w) t += (v = -std::log(1.0 - rng.uniform()));
    for (auto& v : w) v /= t;
    return ProbVector(std::move(w));
  };
  ProbVector xs = simplex_point();
  ProbVector ys = simplex_point();
  std::vector<double> d(2 * uq);
  double norm = 0.0;
  while (norm == 0.0) {
    for (std::size_t half = 0; half < 2; ++half) {
      double mean = 0.0;
      for (std::size_t k = 0; k < uq; ++k) mean += (d[half * uq + k] = rng.uniform() - 0.5);
      for (std::size_t k = 0; k < uq; ++k) d[half * uq + k] -= mean / q;
    }
    norm = 0.0;
    for (double v : d) norm += std::abs(v);
  }
  const double r = radius * (1.0 - rng.uniform());
  std::vector<double> xe(uq), ye(uq);
  for (std::size_t k = 0; k < uq; ++k) {
    xe[k] = std::max(0.0, 1.0 / q + r * d[k] / norm);
    ye[k] = std::max(0.0, 1.0 / q + r * d[uq + k] / norm);
  }
  ProbVector x_end(std::move(xe));
  ProbVector y_end(std::move(ye));
  const double ratio = contraction_ratio(xs, ys, x_end, y_end, beta);
  return {std::move(xs), std::move(ys), std::move(x_end), std::move(y_end), ratio};
}

}  // namespace

std::vector<ContractionCase> sample_contraction_near_rho(double beta, int q, double radius, int samples,
                                                         std::uint64_t seed) {
  if (q < 2 || q > kMaxSpinStates) throw ParameterError("sample_contraction_near_rho: bad q");
  if (!(radius > 0.0) || radius > 1.0 / q) throw ParameterError("radius must lie in (0, 1/q]");
  if (samples < 1) throw ParameterError("samples must be >= 1");
  std::vector<std::optional<ContractionCase>> slots(static_cast<std::size_t>(samples));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < samples; ++i) {
    slots[static_cast<std::size_t>(i)] = contraction_sample(beta, q, radius, seed, static_cast<std::uint32_t>(i));
  }
  std::vector<ContractionCase> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<ContractionCase> contraction_grid_to_rho(double beta, int q, int grid) {
  if (grid < 1) throw ParameterError("grid must be >= 1");
  const CompositionIndex lattice(q, grid);
  const ProbVector rho = ProbVector::uniform(q);
  std::vector<ContractionCase> out;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const ProbVector x = lattice.point(i).proportions();
    if (l1_distance(x, rho) < 1e-12) continue;
    const double ratio = contraction_ratio(x, x, rho, rho, beta);
    out.push_back({x, x, rho, rho, ratio});
  }
  return out;
}

double jacobian_tangent_norm_at_rho(double beta, int q) {
  // extreme points of the sum-zero l1 unit ball are (e_i - e_j) / 2
  const auto uq = static_cast<std::size_t>(q);
  std::vector<double> rho(uq, 1.0 / q);
  std::vector<double> g(uq);
  std::vector<double> jac(uq * uq);
  jacobian_into(rho, beta, g, jac);
  double best = 0.0;
  for (std::size_t i = 0; i < uq; ++i) {
    for (std::size_t j = 0; j < uq; ++j) {
      if (i == j) continue;
      double acc = 0.0;
      for (std::size_t k = 0; k < uq; ++k) acc += std::abs(0.5 * (jac[k * uq + i] - jac[k * uq + j]));
      best = std::max(best, acc);
    }
  }
  return best;
}

double jacobian_l1_norm_at_rho(double beta, int q) {
  const auto uq = static_cast<std::size_t>(q);
  std::vector<double> rho(uq, 1.0 / q);
  std::vector<double> g(uq);
  std::vector<double> jac(uq * uq);
  jacobian_into(rho, beta, g, jac);
  double best = 0.0;
  for (std::size_t j = 0; j < uq; ++j) {
    double col = 0.0;
    for (std::size_t k = 0; k < uq; ++k) col += std::abs(jac[k * uq + j]);
    best = std::max(best, col);
  }
  return best;
}

DecayFit fit_exponential_decay(const std::vector<double>& mean_distance, std::uint64_t stride,
                               double upper_fraction, double floor) {
  DecayFit fit;
  if (mean_distance.empty() || stride == 0) return fit;
  const double upper = upper_fraction * mean_distance.front();
  std::size_t begin = 0;
  while (begin < mean_distance.size() && mean_distance[begin] > upper) ++begin;
  std::size_t end = begin;
  while (end < mean_distance.size() && mean_distance[end] >= floor) ++end;
  const std::size_t m = end - begin;
  fit.points = static_cast<int>(m);
  if (m < 3) return fit;
  double st = 0.0, sy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    st += static_cast<double>(i * stride);
    sy += std::log(mean_distance[i]);
  }
  const double mt = st / m;
  const double my = sy / m;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double t = static_cast<double>(i * stride) - mt;
    const double y = std::log(mean_distance[i]) - my;
    stt += t * t;
    sty += t * y;
    syy += y * y;
  }
  fit.slope = sty / stt;
  fit.intercept = my - fit.slope * mt;
  fit.r_squared = syy > 0.0 ? sty * sty / (stt * syy) : 1.0;
  return fit;
}

}  // namespace potts
