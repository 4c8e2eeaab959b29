#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracle_values.hpp"
#include "potts/aggregate_path.hpp"
#include "potts/coupling.hpp"
#include "potts/equilibrium.hpp"
#include "potts/error.hpp"
#include "potts/glauber.hpp"
#include "potts/rng.hpp"

using namespace potts;

namespace {

SpinConfig block_config(const std::vector<int>& counts) {
  std::vector<Spin> s;
  for (std::size_t k = 0; k < counts.size(); ++k) s.insert(s.end(), static_cast<std::size_t>(counts[k]), static_cast<Spin>(k));
  return SpinConfig(static_cast<int>(counts.size()), std::move(s));
}

}  // namespace

TEST_CASE("left-only path in links of two flips") {
  const SpinConfig ones = SpinConfig::constant(3, 10, 0);
  const SpinConfig twos = SpinConfig::constant(3, 10, 1);
  const BipartiteConfig a(ones, ones);
  const BipartiteConfig b(twos, ones);
  const MonotonePath path = build_monotone_path(a, b, 0.4);
  CHECK(path.flips_per_link == 2);
  REQUIRE(path.waypoints.size() == 6);
  CHECK(path.waypoints.front() == a);
  CHECK(path.waypoints.back() == b);
  const PathAudit au = audit(path);
  CHECK(au.ok());
  CHECK(au.min_increment == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(au.max_increment == doctest::Approx(0.4).epsilon(1e-14));
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) CHECK(config_distance(path.waypoints[i - 1], path.waypoints[i]) == 2);
}

TEST_CASE("paths reject non-monotone pairs and impossible spacing") {
  // site 0 goes 0 -> 1 while the count of 1 falls overall
  const BipartiteConfig a(SpinConfig(2, {0, 1, 1, 1}), SpinConfig(2, {0, 0, 0, 0}));
  const BipartiteConfig b(SpinConfig(2, {1, 0, 0, 1}), SpinConfig(2, {0, 0, 0, 0}));
  CHECK_THROWS_AS(build_monotone_path(a, b, 0.5), ParameterError);
  const BipartiteConfig c = BipartiteConfig::constant(2, 4, 0);
  CHECK_THROWS_AS(build_monotone_path(c, BipartiteConfig::constant(2, 4, 1), 0.01), ParameterError);
  CHECK_THROWS_AS(build_monotone_path(c, c, 2.5), ParameterError);
}

TEST_CASE("nearest configuration with a target magnetization") {
  const SpinConfig from(3, {0, 0, 0, 1, 2, 2});
  const SpinConfig to = nearest_config_with_magnetization(from, LatticePoint({1, 3, 2}));
  CHECK(magnetization(to) == LatticePoint({1, 3, 2}));
  CHECK(config_distance(from, to) == 2);
  const BipartiteConfig a(from, from);
  const BipartiteConfig b(to, from);
  CHECK(audit(build_monotone_path(a, b, 1.0 / 3)).ok());
}

TEST_CASE("audit holds on random endpoint pairs") {
  RngStream rng({21, 0}, lanes::sampling);
  const int q = 3, n = 60;
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    const BipartiteConfig a = initial_config({q, n, 0.0}, "uniform", {21, static_cast<std::uint32_t>(i)});
    const auto target = [&] {
      std::vector<int> c(3, 0);
      for (int s = 0; s < n; ++s) ++c[rng.index(3)];
      return LatticePoint(c);
    };
    const BipartiteConfig b(nearest_config_with_magnetization(a.left(), target()),
                            nearest_config_with_magnetization(a.right(), target()));
    if (a == b) continue;
    const PathAudit au = audit(build_monotone_path(a, b, 0.1));
    CHECK(au.ok());
    CHECK(au.short_links <= 1);
    ++checked;
  }
  CHECK(checked > 90);
}

TEST_CASE("continuous aggregate variation") {
  const ProbVector rho = ProbVector::uniform(3);
  const ProbVector b({0.8, 0.1, 0.1});
  const double d16 = continuous_aggregate_variation(rho, b, 1.0, 16);
  const double d32 = continuous_aggregate_variation(rho, b, 1.0, 32);
  CHECK(d16 == doctest::Approx(oracle::Dg_q3_beta1_rho_to_0p8).epsilon(1e-8));
  CHECK(std::abs(d16 - d32) <= 1e-8 * d16);
  CHECK(continuous_aggregate_variation(rho, b, 0.0) == 0.0);
  CHECK(continuous_aggregate_variation(b, b, 2.0) == 0.0);
}

TEST_CASE("Riemann sums approach the continuous variation") {
  const int n = 300;
  const SpinConfig start = block_config({160, 70, 70});
  const SpinConfig end = nearest_config_with_magnetization(start, LatticePoint({100, 100, 100}));
  const BipartiteConfig a(start, start);
  const BipartiteConfig b(end, end);
  for (double beta : {1.0, 0.95 * beta_mixing(3)}) {
    const double exact = 2.0 * continuous_aggregate_variation(magnetization(start).proportions(),
                                                              magnetization(end).proportions(), beta);
    double prev = 1e300;
    for (double eps : {0.02, 0.01, 0.005}) {
      const MonotonePath path = build_monotone_path(a, b, eps);
      CHECK(audit(path).ok());
      const double gap = std::abs(discrete_aggregate_variation(path, beta).total() - exact) / exact;
      if (eps == 0.02) CHECK(gap <= 0.02);
      CHECK(gap < prev);
      prev = gap;
    }
  }
  (void)n;
}

TEST_CASE("contraction below beta_s and its failure above beta_c") {
  const double bs = beta_mixing(3);
  const auto cases = sample_contraction_near_rho(0.95 * bs, 3, 0.05, 40, 5);
  REQUIRE(cases.size() == 40);
  for (const auto& c : cases) {
    CHECK(c.ratio < 1.0);
    CHECK(l1_distance(c.x_end, ProbVector::uniform(3)) + l1_distance(c.y_end, ProbVector::uniform(3)) <= 0.05 + 1e-12);
  }
  const double bc = beta_critical(3);
  const ProbVector nu = phi(solve_s(bc + 1.0, 3).s, 3);
  const ProbVector rho = ProbVector::uniform(3);
  // phi(s) is a fixed point of g, so g moves the whole way back: the ratio is 1
  CHECK(contraction_ratio(nu, nu, rho, rho, bc + 1.0) >= 1.0 - 1e-9);

  for (const auto& c : contraction_grid_to_rho(0.9 * bs, 3, 12)) CHECK(c.ratio < 1.0);
}

TEST_CASE("Lipschitz ratio near rho") {
  const double beta = 0.9 * beta_mixing(3);
  const double tangent = jacobian_tangent_norm_at_rho(beta, 3);
  CHECK(tangent == doctest::Approx(beta / 3).epsilon(1e-14));
  CHECK(jacobian_l1_norm_at_rho(beta, 3) == doctest::Approx(2.0 * beta * 2.0 / 9.0).epsilon(1e-14));
  const double r3 = lipschitz_ratio_near_rho(beta, 3, 1e-3, 5000);
  CHECK(r3 < 1.0);
  CHECK(r3 <= tangent + 1e-3);
  const double r5 = lipschitz_ratio_near_rho(beta, 3, 1e-5, 5000);
  CHECK(std::abs(r5 - tangent) < std::abs(r3 - tangent) + 1e-9);
  CHECK(std::abs(r5 - tangent) < 1e-3);
  CHECK(serial::lipschitz_ratio_near_rho(beta, 3, 1e-3, 5000) == r3);
  CHECK_THROWS_AS(lipschitz_ratio_near_rho(beta, 3, 0.9, 10), ParameterError);
}

TEST_CASE("exponential decay fit") {
  std::vector<double> m;
  for (int i = 0; i < 50; ++i) m.push_back(100.0 * std::exp(-0.01 * 20 * i));
  const DecayFit fit = fit_exponential_decay(m, 20, 0.9, 1e-3);
  CHECK(fit.slope == doctest::Approx(-0.01).epsilon(1e-10));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.points == 49);
}

TEST_CASE("distance from equilibrium decays at a rate proportional to 1/n") {
  const double beta = 0.9 * beta_mixing(3);
  std::vector<double> scaled;
  for (int n : {128, 256, 512}) {
    const auto t_max = static_cast<std::uint64_t>(40.0 * n * std::log(n));
    const std::uint64_t stride = static_cast<std::uint64_t>(n) / 4;
    const auto mean = mean_distance_from_equilibrium(ModelParams(3, n, beta), BipartiteConfig::constant(3, n, 0),
                                                     t_max, stride, 18, 1024);
    const DecayFit fit = fit_exponential_decay(mean, stride, 0.5, 2.0);
    MESSAGE("n=" << n << " slope*n=" << fit.slope * n << " r2=" << fit.r_squared << " points=" << fit.points);
    CHECK(fit.slope < 0.0);
    CHECK(fit.r_squared > 0.95);
    scaled.push_back(fit.slope * n);
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  CHECK(*hi / *lo <= 1.25);
  CHECK(*lo / *hi <= 1.25);
}
