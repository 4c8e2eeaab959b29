#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "potts/aggregate_path.hpp"
#include "potts/cli.hpp"
#include "potts/coupling.hpp"
#include "potts/equilibrium.hpp"
#include "potts/error.hpp"
#include "potts/gibbs_exact.hpp"
#include "potts/glauber.hpp"
#include "potts/kernel.hpp"
#include "potts/ldp.hpp"
#include "potts/rng.hpp"

namespace potts::cli {

namespace {

std::string label(const char* fmt, auto... args) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

void add(VerifyReport& r, std::string name, double measured, double tolerance) {
  const bool ok = std::isfinite(measured) && measured <= tolerance;
  r.checks.push_back({r.suite, std::move(name), ok, measured, tolerance});
  r.passed = r.passed && ok;
}

BipartiteConfig random_config(int q, int n, RngStream& rng) {
  std::vector<Spin> left(static_cast<std::size_t>(n));
  std::vector<Spin> right(static_cast<std::size_t>(n));
  for (auto& v : left) v = static_cast<Spin>(rng.index(static_cast<std::uint64_t>(q)));
  for (auto& v : right) v = static_cast<Spin>(rng.index(static_cast<std::uint64_t>(q)));
  return {SpinConfig(q, std::move(left)), SpinConfig(q, std::move(right))};
}

void stationarity(VerifyReport& r) {
  const std::pair<int, int> sizes[] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}};
  for (auto [q, n] : sizes) {
    // q = 2 has no first-order transition; 2 is the Curie-Weiss point of this graph
    const double bc = q >= 3 ? beta_critical(q) : 2.0;
    for (double beta : {0.0, 0.5, 1.5, bc}) {
      const ModelParams p(q, n, beta);
      const ExactEnsemble ens = enumerate_ensemble(p);
      const SparseKernel k = glauber_kernel_from_update_laws(p);
      add(r, label("q=%d n=%d beta=%.17g", q, n, beta), stationarity_residual(k, ens.probs()), 1e-12);
    }
  }
}

void kernel_exactness(VerifyReport& r, std::uint64_t seed) {
  RngStream rng({seed, 0}, lanes::sampling);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const int q = 2 + static_cast<int>(rng.index(4));
    const int n = 1 + static_cast<int>(rng.index(50));
    const double beta = 5.0 * rng.uniform();
    const ModelParams p(q, n, beta);
    const ChainState state(random_config(q, n, rng));
    for (Side side : {Side::left, Side::right}) {
      for (std::size_t v = 0; v < static_cast<std::size_t>(n); ++v) {
        const ProbVector exact = conditional_update_exact(p, state.config, side, v);
        const ProbVector law = update_distribution(p, state, side, v);
        for (int k = 0; k < q; ++k) worst = std::max(worst, std::abs(exact[k] - law[k]));
      }
    }
  }
  add(r, "update law vs conditional Gibbs, 1000 random states, q<=5, n<=50", worst, 1e-14);

  const std::pair<int, int> sizes[] = {{2, 2}, {3, 2}, {2, 3}};
  for (auto [q, n] : sizes) {
    const ModelParams p(q, n, 1.5);
    const double d = max_entry_difference(exact_glauber_kernel(p), glauber_kernel_from_update_laws(p));
    add(r, label("full kernel q=%d n=%d beta=1.5", q, n), d, 1e-14);
  }
}

void duality(VerifyReport& r) {
  for (double beta : {1.0, 2.5, 3.5}) {
    const DualityReport d = duality_gap(beta, 3);
    add(r, label("q=3 beta=%.17g", beta), d.gap, 1e-6);
  }
}

void coupling_marginals(VerifyReport& r, std::uint64_t seed) {
  RngStream rng({seed, 1}, lanes::sampling);
  double law_gap = 0.0;
  double tv_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int q = 2 + static_cast<int>(rng.index(5));
    std::vector<double> a(static_cast<std::size_t>(q)), b(static_cast<std::size_t>(q));
    double sa = 0.0, sb = 0.0;
    for (auto& v : a) sa += (v = -std::log(1.0 - rng.uniform()));
    for (auto& v : b) sb += (v = -std::log(1.0 - rng.uniform()));
    for (auto& v : a) v /= sa;
    for (auto& v : b) v /= sb;
    const ProbVector px(a), py(b);
    const JointDistribution j = coupled_update_dist(px, py);
    const auto mx = j.marginal_x();
    const auto my = j.marginal_y();
    for (int k = 0; k < q; ++k) {
      law_gap = std::max(law_gap, std::abs(mx[static_cast<std::size_t>(k)] - px[k]));
      law_gap = std::max(law_gap, std::abs(my[static_cast<std::size_t>(k)] - py[k]));
    }
    tv_gap = std::max(tv_gap, std::abs(j.mismatch() - total_variation(px.weights(), py.weights())));
  }
  add(r, "joint update law marginals, 1000 random pairs", law_gap, 1e-14);
  add(r, "joint update mismatch equals total variation", tv_gap, 1e-14);

  const ModelParams p(3, 2, 1.0);
  const SparseKernel k = glauber_kernel_from_update_laws(p);
  const auto states = config_state_count(p);
  double row_gap = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const BipartiteConfig a = decode_config(p, rng.index(states));
    const BipartiteConfig b = decode_config(p, rng.index(states));
    std::map<std::uint64_t, double> mx, my;
    for (const CoupledTransition& t : coupled_kernel_row(p, a, b)) {
      mx[t.x] += t.prob;
      my[t.y] += t.prob;
    }
    const auto compare = [&](const std::map<std::uint64_t, double>& m, std::uint64_t row) {
      double total = 0.0;
      for (auto [col, prob] : m) {
        row_gap = std::max(row_gap, std::abs(prob - k.entry(row, col)));
        total += k.entry(row, col);
      }
      row_gap = std::max(row_gap, std::abs(1.0 - total));  // no kernel mass outside the support
    };
    compare(mx, encode_config(a));
    compare(my, encode_config(b));
  }
  add(r, "coupled kernel marginals vs single-chain kernel, q=3 n=2, 2000 pairs", row_gap, 1e-14);
}

void path_audit(VerifyReport& r, std::uint64_t seed) {
  RngStream rng({seed, 2}, lanes::sampling);
  const int q = 3;
  const int n = 60;
  const double eps = 0.1;
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const BipartiteConfig a = random_config(q, n, rng);
    const auto target = [&] {
      std::vector<int> c(static_cast<std::size_t>(q), 0);
      for (int s = 0; s < n; ++s) ++c[rng.index(static_cast<std::uint64_t>(q))];
      return LatticePoint(std::move(c));
    };
    const BipartiteConfig b(nearest_config_with_magnetization(a.left(), target()),
                            nearest_config_with_magnetization(a.right(), target()));
    if (a == b) continue;
    const MonotonePath path = build_monotone_path(a, b, eps);
    if (!audit(path).ok()) ++failures;
  }
  add(r, "monotone path audit failures, 100 random pairs q=3 n=60 eps=0.1", failures, 0.0);
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"stationarity", "kernel-exactness", "duality", "coupling-marginals", "path-audit"};
}

VerifyReport verify_suite(const std::string& name, std::uint64_t seed) {
  if (name == "all") {
    VerifyReport all;
    all.suite = "all";
    for (const std::string& s : suite_names()) {
      VerifyReport part = verify_suite(s, seed);
      all.passed = all.passed && part.passed;
      for (auto& c : part.checks) all.checks.push_back(std::move(c));
    }
    return all;
  }
  VerifyReport r;
  r.suite = name;
  if (name == "stationarity") {
    stationarity(r);
  } else if (name == "kernel-exactness") {
    kernel_exactness(r, seed);
  } else if (name == "duality") {
    duality(r);
  } else if (name == "coupling-marginals") {
    coupling_marginals(r, seed);
  } else if (name == "path-audit") {
    path_audit(r, seed);
  } else {
    throw ParameterError("unknown suite '" + name + "'");
  }
  return r;
}

nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const Check& c : report.checks) {
    checks.push_back({{"suite", c.suite},
                      {"name", c.name},
                      {"passed", c.passed},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance}});
  }
  return {{"suite", report.suite}, {"passed", report.passed}, {"checks", checks}};
}

}  // namespace potts::cli
