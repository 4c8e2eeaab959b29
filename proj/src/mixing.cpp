#include "potts/mixing.hpp"

#include <algorithm>
#include <cmath>

#include "potts/coupling.hpp"
#include "potts/equilibrium.hpp"
#include "potts/error.hpp"
#include "potts/gibbs_exact.hpp"
#include "potts/glauber.hpp"

namespace potts {

ProjectedChain projected_kernel(const ModelParams& params, ProjectedCap cap) {
  CompositionIndex lattice(params.q(), params.n());
  const std::size_t m = lattice.size();
  const std::uint64_t states = static_cast<std::uint64_t>(m) * m;
  if (states > cap.max_states) {
    throw FeasibilityError("projected chain has " + std::to_string(states) + " magnetization pairs",
                           cap.max_states);
  }
  const int q = params.q();
  const int n = params.n();
  const auto uq = static_cast<std::size_t>(q);
  SparseKernel::Builder builder(static_cast<std::size_t>(states));
  std::vector<double> zl(uq), zr(uq), gl(uq), gr(uq);
  std::vector<int> moved(uq);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const auto cl = lattice.counts(a);
      const auto cr = lattice.counts(b);
      for (std::size_t k = 0; k < uq; ++k) {
        zl[k] = static_cast<double>(cl[k]) / n;
        zr[k] = static_cast<double>(cr[k]) / n;
      }
      g_map(zr, params.beta(), gl);  // left spins follow g(right magnetization)
      g_map(zl, params.beta(), gr);
      const std::size_t self = a * m + b;
      std::vector<std::pair<std::size_t, double>> row;
      for (int side = 0; side < 2; ++side) {
        const auto counts = side == 0 ? cl : cr;
        const auto& g = side == 0 ? gl : gr;
        for (std::size_t from = 0; from < uq; ++from) {
          if (counts[from] == 0) continue;
          const double pick = 0.5 * static_cast<double>(counts[from]) / n;
          for (std::size_t to = 0; to < uq; ++to) {
            if (to == from) {
              row.emplace_back(self, pick * g[to]);
              continue;
            }
            std::copy(counts.begin(), counts.end(), moved.begin());
            --moved[from];
            ++moved[to];
            const std::size_t r = lattice.rank(moved);
            row.emplace_back(side == 0 ? r * m + b : a * m + r, pick * g[to]);
          }
        }
      }
      builder.add_row(std::move(row));
    }
  }
  return {std::move(lattice), std::move(builder).build()};
}

std::vector<double> projected_stationary(const ModelParams& params, const CompositionIndex& lattice) {
  const std::size_t m = lattice.size();
  const int q = params.q();
  const int n = params.n();
  std::vector<double> log_multinom(m);
  for (std::size_t i = 0; i < m; ++i) {
    double v = std::lgamma(n + 1.0);
    for (int c : lattice.counts(i)) v -= std::lgamma(c + 1.0);
    log_multinom[i] = v;
  }
  std::vector<double> logw(m * m);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const auto ca = lattice.counts(a);
      const auto cb = lattice.counts(b);
      std::int64_t overlap = 0;
      for (std::size_t k = 0; k < static_cast<std::size_t>(q); ++k) overlap += static_cast<std::int64_t>(ca[k]) * cb[k];
      const double v = log_multinom[a] + log_multinom[b] + params.beta() * static_cast<double>(overlap) / n;
      logw[a * m + b] = v;
      top = std::max(top, v);
    }
  }
  double total = 0.0;
  for (double& v : logw) total += (v = std::exp(v - top));
  for (double& v : logw) v /= total;
  return logw;
}

PowerIteration stationary_by_power_iteration(const SparseKernel& k, double tol, int max_iterations) {
  PowerIteration out;
  out.pi.assign(k.states(), 1.0 / static_cast<double>(k.states()));
  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    std::vector<double> next = k.left_apply(out.pi);
    double diff = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) diff = std::max(diff, std::abs(next[i] - out.pi[i]));
    out.pi.swap(next);
    if (diff <= tol) break;
  }
  out.residual = stationarity_residual(k, out.pi);
  return out;
}

namespace {

double tv_dense(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return 0.5 * acc;
}

void apply_row(const SparseKernel& k, std::span<const double> in, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double v = in[i];
    if (v == 0.0) continue;
    const auto cols = k.row_columns(i);
    const auto vals = k.row_values(i);
    for (std::size_t e = 0; e < cols.size(); ++e) out[cols[e]] += v * vals[e];
  }
}

TvCurve tv_curve_impl(const ModelParams& params, std::uint64_t t_max, ProjectedCap cap, TvOptions options,
                      bool parallel) {
  const ProjectedChain chain = projected_kernel(params, cap);
  const std::vector<double> pi = projected_stationary(params, chain.lattice);
  const std::size_t states = chain.kernel.states();
  const int q = params.q();
  const int n = params.n();

  std::vector<std::size_t> corners;
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      std::vector<int> l(static_cast<std::size_t>(q), 0), r(static_cast<std::size_t>(q), 0);
      l[static_cast<std::size_t>(a)] = n;
      r[static_cast<std::size_t>(b)] = n;
      corners.push_back(chain.index(l, r));
    }
  }
  TvCurve curve;
  std::vector<std::size_t> starts;
  if (states <= options.all_starts_max) {
    curve.start_scope = "all";
    for (std::size_t s = 0; s < states; ++s) starts.push_back(s);
  } else {
    curve.start_scope = "corners";
    starts = corners;
  }
  // positions of the dbar starts within `starts`
  std::vector<std::size_t> dbar_rows;
  if (starts.size() <= options.dbar_all_max) {
    curve.dbar_scope = "all";
    for (std::size_t i = 0; i < starts.size(); ++i) dbar_rows.push_back(i);
  } else {
    curve.dbar_scope = "corners";
    for (std::size_t c : corners) {
      dbar_rows.push_back(static_cast<std::size_t>(std::find(starts.begin(), starts.end(), c) - starts.begin()));
    }
  }

  const std::size_t ns = starts.size();
  std::vector<double> cur(ns * states, 0.0);
  std::vector<double> next(ns * states, 0.0);
  for (std::size_t i = 0; i < ns; ++i) cur[i * states + starts[i]] = 1.0;
  std::vector<double> tv(ns);

  for (std::uint64_t t = 0; t <= t_max; ++t) {
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(ns); ++i) {
      const auto ui = static_cast<std::size_t>(i);
      tv[ui] = tv_dense({cur.data() + ui * states, states}, pi);
    }
    std::size_t arg = 0;
    for (std::size_t i = 1; i < ns; ++i)
      if (tv[i] > tv[arg]) arg = i;
    double dbar = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : dbar) if (parallel)
    for (std::int64_t a = 0; a < static_cast<std::int64_t>(dbar_rows.size()); ++a) {
      const std::size_t ra = dbar_rows[static_cast<std::size_t>(a)];
      for (std::size_t b = static_cast<std::size_t>(a) + 1; b < dbar_rows.size(); ++b) {
        const std::size_t rb = dbar_rows[b];
        dbar = std::max(dbar, tv_dense({cur.data() + ra * states, states}, {cur.data() + rb * states, states}));
      }
    }
    curve.times.push_back(t);
    curve.distances.push_back(tv[arg]);
    curve.pair_distances.push_back(dbar);
    curve.argmax_start.push_back(starts[arg]);
    if (!curve.t_mix_quarter && tv[arg] <= 0.25) curve.t_mix_quarter = t;
    if (t == t_max) break;
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(ns); ++i) {
      const auto ui = static_cast<std::size_t>(i);
      apply_row(chain.kernel, {cur.data() + ui * states, states}, {next.data() + ui * states, states});
    }
    cur.swap(next);
  }
  return curve;
}

}  // namespace

TvCurve exact_tv_curve(const ModelParams& params, std::uint64_t t_max, ProjectedCap cap, TvOptions options) {
  return tv_curve_impl(params, t_max, cap, options, true);
}

namespace serial {
TvCurve exact_tv_curve(const ModelParams& params, std::uint64_t t_max, ProjectedCap cap, TvOptions options) {
  return tv_curve_impl(params, t_max, cap, options, false);
}
}  // namespace serial

std::vector<double> projected_tv_from(const ProjectedChain& chain, const std::vector<double>& pi,
                                      std::size_t start, std::uint64_t t_max) {
  const std::size_t states = chain.kernel.states();
  if (start >= states) throw ParameterError("projected_tv_from: start out of range");
  std::vector<double> cur(states, 0.0), next(states);
  cur[start] = 1.0;
  std::vector<double> out;
  for (std::uint64_t t = 0; t <= t_max; ++t) {
    out.push_back(tv_dense(cur, pi));
    if (t == t_max) break;
    apply_row(chain.kernel, cur, next);
    cur.swap(next);
  }
  return out;
}

CouplingBound coupling_upper_bound(const ModelParams& params, const BipartiteConfig& x0, std::uint64_t t_max,
                                   std::uint64_t seed, int replicas) {
  if (replicas < 1) throw ParameterError("replicas must be >= 1");
  const EquilibriumSampler sampler(params);
  const std::size_t points = static_cast<std::size_t>(t_max) + 1;
  std::vector<std::vector<std::uint8_t>> mismatch(static_cast<std::size_t>(replicas));
#pragma omp parallel for schedule(dynamic, 4)
  for (int r = 0; r < replicas; ++r) {
    const RngSpec spec{seed, static_cast<std::uint32_t>(r)};
    RngStream init(spec, lanes::sampling);
    GreedyCoupling c(params, spec, x0, sampler.sample(init));
    auto& row = mismatch[static_cast<std::size_t>(r)];
    row.resize(points);
    row[0] = c.state().distance > 0;
    for (std::size_t t = 1; t < points; ++t) {
      if (!c.state().coalesced_at) c.step();
      row[t] = c.state().distance > 0;
    }
  }
  CouplingBound out;
  out.p.assign(points, 0.0);
  out.stderr_.assign(points, 0.0);
  for (std::size_t t = 0; t < points; ++t) {
    int k = 0;
    for (const auto& row : mismatch) k += row[t];
    out.p[t] = static_cast<double>(k) / replicas;
    // Laplace-smoothed proportion keeps the error bar positive at k = 0 or k = R
    const double ps = (k + 1.0) / (replicas + 2.0);
    out.stderr_[t] = std::sqrt(ps * (1.0 - ps) / replicas);
  }
  return out;
}

namespace {

double n_log_n(int n) { return n * std::log(static_cast<double>(n)); }

void mean_and_stderr(const std::vector<double>& xs, double& mean, double& se) {
  mean = 0.0;
  se = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

}  // namespace

ScalingFit coupling_time_scaling(int q, double beta, const std::vector<int>& n_list, int replicas,
                                 std::uint64_t seed, ScalingOptions options) {
  if (replicas < 1) throw ParameterError("replicas must be >= 1");
  if (n_list.empty()) throw ParameterError("n_list is empty");
  ScalingFit fit;
  if (q >= 3 && beta >= beta_mixing(q)) {
    fit.warning = "beta >= beta_s(q): outside the rapid-mixing regime";
  }
  for (int n : n_list) {
    if (n < 2) throw ParameterError("scaling needs n >= 2");
    const ModelParams params(q, n, beta);
    ScalingPoint pt;
    pt.n = n;
    pt.replicas = replicas;
    pt.t_max = static_cast<std::uint64_t>(std::ceil(options.t_max_factor * n_log_n(n)));
    const auto results = run_coupling_replicas(params, BipartiteConfig::constant(q, n, 0),
                                               BipartiteConfig::constant(q, n, 1), pt.t_max, seed, replicas);
    std::vector<double> times;
    for (const auto& r : results) {
      if (r.timed_out) {
        ++pt.timeouts;
      } else {
        times.push_back(static_cast<double>(*r.coupling_time));
      }
    }
    mean_and_stderr(times, pt.mean, pt.stderr_);
    if (pt.timeouts > 0) fit.flagged = true;
    fit.points.push_back(pt);
  }
  double sxy = 0.0, sxx = 0.0, ybar = 0.0;
  for (const auto& p : fit.points) {
    const double x = n_log_n(p.n);
    sxy += x * p.mean;
    sxx += x * x;
    ybar += p.mean;
  }
  ybar /= static_cast<double>(fit.points.size());
  fit.slope_a = sxy / sxx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : fit.points) {
    const double resid = p.mean - fit.slope_a * n_log_n(p.n);
    ss_res += resid * resid;
    ss_tot += (p.mean - ybar) * (p.mean - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;
  return fit;
}

double default_escape_radius(int q, double beta) {
  SRoot root = solve_s(beta, q);
  if (!root.nontrivial) root = solve_s(beta_critical(q), q);
  // |phi(s) - rho|_1 = 2 (q-1) s / q
  return (q - 1) * root.s / q;
}

std::vector<EscapePoint> slow_mixing_probe(int q, double beta, const std::vector<int>& n_list, int replicas,
                                           std::uint64_t seed, EscapeOptions options) {
  if (replicas < 1) throw ParameterError("replicas must be >= 1");
  const double radius = options.radius ? *options.radius : default_escape_radius(q, beta);
  if (!(radius > 0.0)) throw ParameterError("escape radius must be positive");
  std::vector<EscapePoint> table;
  for (int n : n_list) {
    if (n < 2) throw ParameterError("escape probe needs n >= 2");
    const ModelParams params(q, n, beta);
    EscapePoint pt;
    pt.n = n;
    pt.radius = radius;
    pt.replicas = replicas;
    pt.cap = static_cast<std::uint64_t>(std::ceil(options.cap_factor * n_log_n(n)));
    std::vector<double> times(static_cast<std::size_t>(replicas));
    std::vector<std::uint8_t> censored(static_cast<std::size_t>(replicas), 0);
    // integer form of |c/n - 1/q|_1 <= r: sum_k |q c_k - n| <= r q n
    const double limit = radius * q * n + 1e-9;
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < replicas; ++r) {
      GlauberChain chain(params, {seed, static_cast<std::uint32_t>(r)}, BipartiteConfig::constant(q, n, 0));
      const auto escaped = [&] {
        long acc = 0;
        for (int c : chain.state().mags.left.counts()) acc += std::labs(static_cast<long>(q) * c - n);
        return static_cast<double>(acc) <= limit;
      };
      while (!escaped() && chain.state().step < pt.cap) chain.step();
      times[static_cast<std::size_t>(r)] = static_cast<double>(chain.state().step);
      censored[static_cast<std::size_t>(r)] = escaped() ? 0 : 1;
    }
    for (auto c : censored) pt.censored += c;
    mean_and_stderr(times, pt.mean, pt.stderr_);
    table.push_back(pt);
  }
  return table;
}

}  // namespace potts
