#include <cmath>

#include "doctest.h"
#include "potts/equilibrium.hpp"
#include "potts/error.hpp"
#include "potts/gibbs_exact.hpp"
#include "potts/mixing.hpp"

using namespace potts;

TEST_CASE("projected stationary law matches the exact pushforward") {
  const ModelParams p(3, 4, 1.3);
  const ProjectedChain chain = projected_kernel(p);
  const auto pi = projected_stationary(p, chain.lattice);
  const MagnetizationLaw law = magnetization_pushforward(enumerate_ensemble(p));
  REQUIRE(pi.size() == law.probs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) worst = std::max(worst, std::abs(pi[i] - law.probs[i]));
  CHECK(worst <= 1e-12);
  CHECK(stationarity_residual(chain.kernel, pi) <= 1e-12);
  CHECK(detailed_balance_residual(chain.kernel, pi) <= 1e-12);

  const PowerIteration pw = stationary_by_power_iteration(chain.kernel, 1e-15);
  double gap = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) gap = std::max(gap, std::abs(pi[i] - pw.pi[i]));
  CHECK(gap <= 1e-9);
}

TEST_CASE("projected chain cap") {
  CHECK_THROWS_AS(projected_kernel(ModelParams(3, 40, 1.0), ProjectedCap{1000}), FeasibilityError);
}

TEST_CASE("distance curve is nonincreasing with a finite mixing time") {
  const ModelParams p(3, 6, 1.0);
  const TvCurve curve = exact_tv_curve(p, 400);
  CHECK(curve.start_scope == "all");
  REQUIRE(curve.distances.size() == 401);
  for (std::size_t t = 1; t < curve.distances.size(); ++t) {
    CHECK(curve.distances[t] <= curve.distances[t - 1] + 1e-12);
    CHECK(curve.pair_distances[t] <= curve.pair_distances[t - 1] + 1e-12);
    CHECK(curve.distances[t] <= curve.pair_distances[t] + 1e-12);
  }
  REQUIRE(curve.t_mix_quarter.has_value());
  CHECK(curve.distances[*curve.t_mix_quarter] <= 0.25);
  CHECK(curve.distances[*curve.t_mix_quarter - 1] > 0.25);

  const TvCurve ref = serial::exact_tv_curve(p, 400);
  CHECK(ref.distances == curve.distances);
  CHECK(ref.pair_distances == curve.pair_distances);
}

TEST_CASE("corner starts on a larger lattice") {
  const TvCurve curve = exact_tv_curve(ModelParams(3, 12, 1.0), 50, {}, TvOptions{100, 5});
  CHECK(curve.start_scope == "corners");
  CHECK(curve.dbar_scope == "corners");
  for (std::size_t t = 1; t < curve.distances.size(); ++t) CHECK(curve.distances[t] <= curve.distances[t - 1] + 1e-12);
}

TEST_CASE("infinite temperature decays geometrically after a sweep") {
  const ModelParams p(2, 2, 0.0);
  const TvCurve curve = exact_tv_curve(p, 60);
  const double rate = 1.0 - 1.0 / (2.0 * p.n());
  for (std::size_t t = 2 * static_cast<std::size_t>(p.n()); t + 1 < curve.distances.size(); ++t) {
    if (curve.distances[t] < 1e-12) break;
    CHECK(curve.distances[t + 1] <= rate * curve.distances[t] * (1.0 + 1e-9));
  }
}

TEST_CASE("coupling bound sits above the exact distance") {
  const ModelParams p(3, 4, 1.0);
  const BipartiteConfig x0 = BipartiteConfig::constant(3, 4, 0);
  const ProjectedChain chain = projected_kernel(p);
  const auto pi = projected_stationary(p, chain.lattice);
  const auto mags = magnetization(x0);
  const auto exact = projected_tv_from(chain, pi, chain.index(mags.left.counts(), mags.right.counts()), 100);
  const CouplingBound bound = coupling_upper_bound(p, x0, 100, 3, 2000);
  REQUIRE(bound.p.size() == 101);
  for (std::size_t t = 1; t <= 100; ++t) {
    CHECK(bound.stderr_[t] > 0.0);
    CHECK(exact[t] <= bound.p[t] + 3.0 * bound.stderr_[t]);
  }
}

TEST_CASE("coupling-time scaling at small sizes") {
  const double beta = 0.9 * beta_mixing(3);
  const ScalingFit fit = coupling_time_scaling(3, beta, {16, 32, 64}, 40, 4);
  REQUIRE(fit.points.size() == 3);
  CHECK(fit.slope_a > 0.0);
  CHECK(!fit.flagged);
  CHECK(fit.warning.empty());
  CHECK(fit.points[2].mean > fit.points[0].mean);

  const ScalingFit hot = coupling_time_scaling(3, beta_mixing(3) + 0.01, {8}, 4, 4, ScalingOptions{50.0});
  CHECK(!hot.warning.empty());
  CHECK_THROWS_AS(coupling_time_scaling(3, beta, {}, 4, 4), ParameterError);
}

TEST_CASE("escape probe censors at the cap") {
  const double beta = beta_critical(3) + 0.5;
  const auto pts = slow_mixing_probe(3, beta, {24}, 4, 9, EscapeOptions{1.0, std::nullopt});
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].cap == static_cast<std::uint64_t>(std::ceil(24 * std::log(24.0))));
  CHECK(pts[0].censored == 4);
  CHECK(pts[0].mean == doctest::Approx(static_cast<double>(pts[0].cap)));
  CHECK(pts[0].radius == doctest::Approx(default_escape_radius(3, beta)));

  const auto fast = slow_mixing_probe(3, 1.0, {24}, 8, 9);
  CHECK(fast[0].censored == 0);
  CHECK(fast[0].mean < static_cast<double>(fast[0].cap));
}
