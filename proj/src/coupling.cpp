#include "potts/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "potts/error.hpp"

namespace potts {

double JointDistribution::mismatch() const {
  double acc = 0.0;
  for (int k = 0; k < q; ++k)
    for (int m = 0; m < q; ++m)
      if (k != m) acc += at(k, m);
  return acc;
}

std::vector<double> JointDistribution::marginal_x() const {
  std::vector<double> out(static_cast<std::size_t>(q), 0.0);
  for (int k = 0; k < q; ++k)
    for (int m = 0; m < q; ++m) out[static_cast<std::size_t>(k)] += at(k, m);
  return out;
}

std::vector<double> JointDistribution::marginal_y() const {
  std::vector<double> out(static_cast<std::size_t>(q), 0.0);
  for (int k = 0; k < q; ++k)
    for (int m = 0; m < q; ++m) out[static_cast<std::size_t>(m)] += at(k, m);
  return out;
}

double total_variation(std::span<const double> px, std::span<const double> py) {
  if (px.size() != py.size()) throw DimensionError("total_variation: lengths differ");
  double acc = 0.0;
  for (std::size_t k = 0; k < px.size(); ++k) acc += std::abs(px[k] - py[k]);
  return 0.5 * acc;
}

JointDistribution coupled_update_dist(const ProbVector& px, const ProbVector& py) {
  if (px.q() != py.q()) throw DimensionError("coupled_update_dist: different q");
  const int q = px.q();
  JointDistribution j{q, std::vector<double>(static_cast<std::size_t>(q * q), 0.0)};
  double overlap = 0.0;
  for (int k = 0; k < q; ++k) {
    const double m = std::min(px[k], py[k]);
    j.p[static_cast<std::size_t>(k * q + k)] = m;
    overlap += m;
  }
  const double residual = 1.0 - overlap;
  if (px == py || residual <= 0.0) {
    for (int k = 0; k < q; ++k) j.p[static_cast<std::size_t>(k * q + k)] = px[k];
    return j;
  }
  for (int k = 0; k < q; ++k) {
    const double rx = px[k] - std::min(px[k], py[k]);
    if (rx <= 0.0) continue;
    for (int m = 0; m < q; ++m) {
      if (m == k) continue;
      const double ry = py[m] - std::min(px[m], py[m]);
      j.p[static_cast<std::size_t>(k * q + m)] = rx * ry / residual;
    }
  }
  return j;
}

CouplingState::CouplingState(BipartiteConfig x0, BipartiteConfig y0)
    : x(std::move(x0)), y(std::move(y0)), distance(config_distance(x.config, y.config)) {
  if (distance == 0) coalesced_at = 0;
}

Kappa kappa(const ModelParams& params, const BipartiteConfig& a, const BipartiteConfig& b) {
  if (a.q() != params.q() || b.q() != params.q() || a.n() != params.n() || b.n() != params.n()) {
    throw DimensionError("kappa: configurations do not match the model");
  }
  const MagnetizationPair ma = magnetization(a);
  const MagnetizationPair mb = magnetization(b);
  const double beta = params.beta();
  const int q = params.q();
  Kappa out;
  auto side_terms = [&](const LatticePoint& la, const LatticePoint& lb, double& exact, double& linear) {
    const ProbVector za = la.proportions();
    const ProbVector zb = lb.proportions();
    const ProbVector ga = g_map(za, beta);
    const ProbVector gb = g_map(zb, beta);
    exact = total_variation(ga.weights(), gb.weights());
    const std::vector<double> jac = g_jacobian(za, beta);
    double acc = 0.0;
    for (int k = 0; k < q; ++k) {
      double d = 0.0;
      for (int j = 0; j < q; ++j) d += jac[static_cast<std::size_t>(k * q + j)] * (zb[j] - za[j]);
      acc += std::abs(d);
    }
    linear = 0.5 * acc;
  };
  // a left vertex reads the right side
  side_terms(ma.right, mb.right, out.left, out.left_linear);
  side_terms(ma.left, mb.left, out.right, out.right_linear);
  return out;
}

double one_step_expected_distance(const ModelParams& params, const BipartiteConfig& a,
                                  const BipartiteConfig& b) {
  const ChainState sa(a);
  const ChainState sb(b);
  if (a.q() != params.q() || b.q() != params.q() || a.n() != params.n() || b.n() != params.n()) {
    throw DimensionError("one_step_expected_distance: configurations do not match the model");
  }
  const int n = params.n();
  const int d = config_distance(a, b);
  double acc = 0.0;
  for (int site = 0; site < 2 * n; ++site) {
    const Side side = site < n ? Side::left : Side::right;
    const auto i = static_cast<std::size_t>(side == Side::left ? site : site - n);
    const JointDistribution j =
        coupled_update_dist(update_distribution(params, sa, side, i), update_distribution(params, sb, side, i));
    const int before = a.side(side)[i] != b.side(side)[i] ? 1 : 0;
    acc += static_cast<double>(d - before) + j.mismatch();
  }
  return acc / (2.0 * n);
}

std::vector<CoupledTransition> coupled_kernel_row(const ModelParams& params, const BipartiteConfig& a,
                                                  const BipartiteConfig& b) {
  const ChainState sa(a);
  const ChainState sb(b);
  const int n = params.n();
  const int q = params.q();
  const double pick = 1.0 / (2.0 * n);
  const std::uint64_t xa = encode_config(a);
  const std::uint64_t xb = encode_config(b);
  std::vector<CoupledTransition> row;
  std::uint64_t place = 1;
  for (int site = 0; site < 2 * n; ++site) {
    const Side side = site < n ? Side::left : Side::right;
    const auto i = static_cast<std::size_t>(side == Side::left ? site : site - n);
    const JointDistribution j =
        coupled_update_dist(update_distribution(params, sa, side, i), update_distribution(params, sb, side, i));
    const auto ca = static_cast<std::uint64_t>(a.side(side)[i]);
    const auto cb = static_cast<std::uint64_t>(b.side(side)[i]);
    for (int k = 0; k < q; ++k) {
      for (int m = 0; m < q; ++m) {
        const double p = j.at(k, m);
        if (p == 0.0) continue;
        row.push_back({xa - ca * place + static_cast<std::uint64_t>(k) * place,
                       xb - cb * place + static_cast<std::uint64_t>(m) * place, pick * p});
      }
    }
    place *= static_cast<std::uint64_t>(q);
  }
  return row;
}

GreedyCoupling::GreedyCoupling(ModelParams params, RngSpec rng, BipartiteConfig x0, BipartiteConfig y0)
    : params_(params), rng_(rng), state_(std::move(x0), std::move(y0)), table_(update_weight_table(params)) {
  const auto& cx = state_.x.config;
  const auto& cy = state_.y.config;
  if (cx.q() != params.q() || cx.n() != params.n() || cy.q() != params.q() || cy.n() != params.n()) {
    throw DimensionError("coupled configurations do not match the model's (q, n)");
  }
}

void GreedyCoupling::step() {
  const int q = params_.q();
  const int n = params_.n();
  const std::uint64_t t = state_.x.step;
  const auto r = rng_.bits(t, lanes::dynamics);
  const auto site = static_cast<int>(CounterRng::to_index(r[0], static_cast<std::uint64_t>(2 * n)));
  const Side side = site < n ? Side::left : Side::right;
  const auto i = static_cast<std::size_t>(side == Side::left ? site : site - n);
  const double u = CounterRng::to_unit(r[1]);

  const auto ox = state_.x.mags.side(opposite(side)).counts();
  const auto oy = state_.y.mags.side(opposite(side)).counts();
  const auto uq = static_cast<std::size_t>(q);
  int kx = 0;
  int ky = 0;
  if (std::equal(ox.begin(), ox.end(), oy.begin())) {
    double w[kMaxSpinStates];
    for (std::size_t k = 0; k < uq; ++k) w[k] = table_[static_cast<std::size_t>(ox[k])];
    kx = ky = sample_spin({w, uq}, u);
  } else {
    double px[kMaxSpinStates];
    double py[kMaxSpinStates];
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t k = 0; k < uq; ++k) {
      sx += (px[k] = table_[static_cast<std::size_t>(ox[k])]);
      sy += (py[k] = table_[static_cast<std::size_t>(oy[k])]);
    }
    double mins[kMaxSpinStates];
    double overlap = 0.0;
    for (std::size_t k = 0; k < uq; ++k) {
      px[k] /= sx;
      py[k] /= sy;
      overlap += (mins[k] = std::min(px[k], py[k]));
    }
    if (u < overlap) {
      kx = ky = sample_spin({mins, uq}, u / overlap);
    } else {
      const auto r2 = rng_.bits(t, lanes::dynamics_extra);
      double rx[kMaxSpinStates];
      double ry[kMaxSpinStates];
      double tx = 0.0;
      double ty = 0.0;
      for (std::size_t k = 0; k < uq; ++k) {
        tx += (rx[k] = px[k] - mins[k]);
        ty += (ry[k] = py[k] - mins[k]);
      }
      kx = sample_spin(tx > 0.0 ? std::span<const double>(rx, uq) : std::span<const double>(px, uq),
                       CounterRng::to_unit(r2[0]));
      ky = sample_spin(ty > 0.0 ? std::span<const double>(ry, uq) : std::span<const double>(py, uq),
                       CounterRng::to_unit(r2[1]));
    }
  }

  const int cx = state_.x.config.side(side)[i];
  const int cy = state_.y.config.side(side)[i];
  if (kx != cx) {
    state_.x.config.assign(side, i, static_cast<Spin>(kx));
    state_.x.mags.side(side).transfer(cx, kx);
  }
  if (ky != cy) {
    state_.y.config.assign(side, i, static_cast<Spin>(ky));
    state_.y.mags.side(side).transfer(cy, ky);
  }
  state_.distance += (kx != ky ? 1 : 0) - (cx != cy ? 1 : 0);
  ++state_.x.step;
  ++state_.y.step;
  if (state_.distance == 0 && !state_.coalesced_at) state_.coalesced_at = state_.x.step;
#ifdef POTTS_DEBUG_INVARIANTS
  check_invariants(state_.x);
  check_invariants(state_.y);
  if (state_.distance != config_distance(state_.x.config, state_.y.config)) {
    throw InconsistencyError("coupling distance drifted from the configurations");
  }
#endif
}

CouplingRun GreedyCoupling::run(std::uint64_t t_max, std::uint64_t trace_stride) {
  CouplingRun out;
  if (trace_stride > 0) out.trace.push_back({state_.step(), state_.distance});
  while (!state_.coalesced_at && state_.step() < t_max) {
    step();
    if (trace_stride > 0 && state_.step() % trace_stride == 0) out.trace.push_back({state_.step(), state_.distance});
  }
  if (trace_stride > 0 && out.trace.back().step != state_.step()) out.trace.push_back({state_.step(), state_.distance});
  out.coupling_time = state_.coalesced_at;
  out.timed_out = !state_.coalesced_at.has_value();
  return out;
}

namespace {

ReplicaResult one_replica(const ModelParams& params, const BipartiteConfig& x0, const BipartiteConfig& y0,
                          std::uint64_t t_max, std::uint64_t seed, std::uint32_t r) {
  GreedyCoupling c(params, {seed, r}, x0, y0);
  const CouplingRun run = c.run(t_max);
  return {r, run.coupling_time, run.timed_out};
}

}  // namespace

std::vector<ReplicaResult> run_coupling_replicas(const ModelParams& params, const BipartiteConfig& x0,
                                                 const BipartiteConfig& y0, std::uint64_t t_max,
                                                 std::uint64_t seed, int replicas) {
  std::vector<ReplicaResult> out(static_cast<std::size_t>(std::max(replicas, 0)));
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < replicas; ++r) {
    out[static_cast<std::size_t>(r)] = one_replica(params, x0, y0, t_max, seed, static_cast<std::uint32_t>(r));
  }
  return out;
}

namespace serial {
std::vector<ReplicaResult> run_coupling_replicas(const ModelParams& params, const BipartiteConfig& x0,
                                                 const BipartiteConfig& y0, std::uint64_t t_max,
                                                 std::uint64_t seed, int replicas) {
  std::vector<ReplicaResult> out;
  for (int r = 0; r < replicas; ++r) {
    out.push_back(one_replica(params, x0, y0, t_max, seed, static_cast<std::uint32_t>(r)));
  }
  return out;
}
}  // namespace serial

std::vector<double> mean_distance_from_equilibrium(const ModelParams& params, const BipartiteConfig& x0,
                                                   std::uint64_t t_max, std::uint64_t stride,
                                                   std::uint64_t seed, int replicas) {
  if (stride == 0) throw ParameterError("stride must be >= 1");
  const std::size_t points = static_cast<std::size_t>(t_max / stride) + 1;
  std::vector<std::vector<int>> per(static_cast<std::size_t>(std::max(replicas, 0)));
  const EquilibriumSampler sampler(params);
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < replicas; ++r) {
    RngStream init({seed, static_cast<std::uint32_t>(r)}, lanes::sampling);
    GreedyCoupling c(params, {seed, static_cast<std::uint32_t>(r)}, x0, sampler.sample(init));
    auto& row = per[static_cast<std::size_t>(r)];
    row.reserve(points);
    row.push_back(c.state().distance);
    for (std::size_t p = 1; p < points; ++p) {
      for (std::uint64_t s = 0; s < stride && !c.state().coalesced_at; ++s) c.step();
      row.push_back(c.state().distance);
    }
  }
  std::vector<double> mean(points, 0.0);
  for (const auto& row : per)
    for (std::size_t p = 0; p < points; ++p) mean[p] += row[p];
  for (double& m : mean) m /= replicas;
  return mean;
}

OneStepSlack one_step_slack(const ModelParams& params, int pairs, std::uint64_t seed) {
  const int q = params.q();
  const int n = params.n();
  OneStepSlack out;
  double excess = -std::numeric_limits<double>::infinity();
  double c_min = -std::numeric_limits<double>::infinity();
  int used = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : c_min) reduction(max : excess) reduction(+ : used)
  for (int i = 0; i < pairs; ++i) {
    RngStream rng({seed, static_cast<std::uint32_t>(i)}, lanes::sampling);
    std::vector<Spin> left(static_cast<std::size_t>(n));
    std::vector<Spin> right(static_cast<std::size_t>(n));
    for (auto& v : left) v = static_cast<Spin>(rng.index(static_cast<std::uint64_t>(q)));
    for (auto& v : right) v = static_cast<Spin>(rng.index(static_cast<std::uint64_t>(q)));
    const BipartiteConfig a(SpinConfig(q, std::move(left)), SpinConfig(q, std::move(right)));
    BipartiteConfig b = a;
    const auto k = 1 + rng.index(static_cast<std::uint64_t>(2 * n));
    for (std::uint64_t j = 0; j < k; ++j) {
      const auto site = static_cast<int>(rng.index(static_cast<std::uint64_t>(2 * n)));
      b.assign(site < n ? Side::left : Side::right, static_cast<std::size_t>(site % n),
               static_cast<Spin>(rng.index(static_cast<std::uint64_t>(q))));
    }
    const double base = (1.0 - 1.0 / (2.0 * n)) * config_distance(a, b);
    const double e1 = one_step_expected_distance(params, a, b);
    const Kappa kp = kappa(params, a, b);
    excess = std::max(excess, e1 - base - 0.5 * kp.total());
    const MagnetizationPair ma = magnetization(a);
    const MagnetizationPair mb = magnetization(b);
    const double eps = l1_distance(ma.left.proportions(), mb.left.proportions()) +
                       l1_distance(ma.right.proportions(), mb.right.proportions());
    if (eps > 0.0) {
      c_min = std::max(c_min, (e1 - base - 0.5 * (kp.left_linear + kp.right_linear)) / (eps * eps));
      ++used;
    }
  }
  out.c_min = std::max(c_min, 0.0);
  out.exact_excess = excess;
  out.pairs = used;
  out.skipped = pairs - used;
  return out;
}

}  // namespace potts
