#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracle_values.hpp"
#include "potts/equilibrium.hpp"
#include "potts/error.hpp"
#include "potts/lattice.hpp"
#include "potts/ldp.hpp"

using namespace potts;

TEST_CASE("relative entropy") {
  const ProbVector rho = ProbVector::uniform(3);
  CHECK(relative_entropy(ProbVector({0.5, 0.5, 0.0}), rho) ==
        doctest::Approx(oracle::rel_entropy_half_half_zero).epsilon(1e-15));
  CHECK(relative_entropy(rho, rho) == 0.0);
  CHECK(relative_entropy(ProbVector({0.5, 0.5, 0.0}), ProbVector({1.0, 0.0, 0.0})) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("alpha and its identity-line split") {
  const ProbVector g({0.6, 0.2, 0.2});
  CHECK(alpha(2.0, g, g) == doctest::Approx(oracle::alpha_beta2_diag_0p6).epsilon(1e-14));
  CHECK(alpha(2.0, g, g) == doctest::Approx(2.0 * 0.44 - 2.0 * relative_entropy(g, ProbVector::uniform(3))));
  CHECK(2.0 * alpha_diag(2.0, g) == doctest::Approx(alpha(2.0, g, g)).epsilon(1e-15));

  const ProbVector a({0.5, 0.3, 0.2});
  const ProbVector b({0.1, 0.1, 0.8});
  CHECK(alpha(1.5, a, b) == doctest::Approx(oracle::alpha_beta1p5_mixed).epsilon(1e-14));
  CHECK(alpha_split(1.5, a, b) == doctest::Approx(alpha(1.5, a, b)).epsilon(1e-14));
  CHECK_THROWS_AS(alpha(1.0, a, ProbVector({0.5, 0.5})), DimensionError);
}

TEST_CASE("alpha_diag ties at criticality") {
  const double bc = beta_critical(3);
  CHECK(std::abs(alpha_diag(bc, ProbVector::uniform(3)) - alpha_diag(bc, phi(0.5, 3))) <= 1e-12);
}

TEST_CASE("rate function") {
  const double beta = 1.0;
  const int q = 3;
  const double sup = sup_alpha(beta, q);
  CHECK(sup == doctest::Approx(beta / q).epsilon(1e-15));
  const ProbVector e1 = ProbVector::vertex(q, 0);
  CHECK(rate_function(beta, e1, e1, sup) == doctest::Approx(beta / q - (beta - 2.0 * std::log(3.0))).epsilon(1e-14));
  CHECK(rate_function(beta, ProbVector::uniform(q), ProbVector::uniform(q), sup) == doctest::Approx(0.0));

  // nonnegative on a 50 x 50 diagonal grid, below and above beta_c
  for (double b : {1.0, 2.5, 3.5}) {
    const double s = sup_alpha(b, q);
    double worst = 0.0;
    for (int i = 0; i <= 50; ++i)
      for (int j = 0; i + j <= 50; ++j) {
        const ProbVector x({i / 50.0, j / 50.0, (50 - i - j) / 50.0});
        worst = std::min(worst, s - alpha(b, x, x));
      }
    CHECK(worst >= -1e-12);
  }
  CHECK_THROWS_AS(rate_function(beta, e1, e1, -10.0), InconsistencyError);
}

TEST_CASE("sup alpha is attained on the identity line") {
  // a grid over P_3 x P_3 never beats the diagonal maximum
  const int m = 20;
  const CompositionIndex grid(3, m);
  for (double beta : {1.0, 3.0}) {
    const double sup = sup_alpha(beta, 3);
    double best = -1e300;
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < grid.size(); ++j)
        best = std::max(best, alpha(beta, grid.point(i).proportions(), grid.point(j).proportions()));
    CHECK(best <= sup + 1e-12);
    CHECK(best >= sup - 0.05);
  }
}

TEST_CASE("log moment generating function and G") {
  const std::vector<double> e1{1.0, 0.0, 0.0};
  const std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK(lmgf(e1, zero) == doctest::Approx(oracle::lmgf_e1_zero).epsilon(1e-15));

  const std::vector<double> rho(3, 1.0 / 3);
  for (double beta : {0.5, 2.0}) {
    CHECK(free_energy_functional(beta, rho, rho) == doctest::Approx(-beta / 3).epsilon(1e-14));
    CHECK(free_energy_functional_diag(beta, rho) == doctest::Approx(-beta / 6).epsilon(1e-14));
  }
  const std::vector<double> x{0.3, -0.2, 1.1};
  const std::vector<double> y{0.0, 0.7, 0.4};
  CHECK(free_energy_functional_split(1.3, x, y) == doctest::Approx(free_energy_functional(1.3, x, y)).epsilon(1e-14));
}

TEST_CASE("gradient of G_beta by central differences") {
  const std::vector<double> x{0.2, 0.9, -0.4, 0.1};
  const double beta = 1.7;
  const auto grad = free_energy_functional_diag_gradient(beta, x);
  for (std::size_t k = 0; k < x.size(); ++k) {
    auto up = x, dn = x;
    const double h = 1e-6;
    up[k] += h;
    dn[k] -= h;
    const double fd = (free_energy_functional_diag(beta, up) - free_energy_functional_diag(beta, dn)) / (2 * h);
    CHECK(grad[k] == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("duality between sup alpha and inf G") {
  const DualityReport low = duality_gap(1.0, 3);
  CHECK(low.sup_alpha == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(low.inf_g == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  for (double beta : {0.0, 2.5, beta_critical(3), 3.5, 6.0}) CHECK(duality_gap(beta, 3).gap <= 1e-6);
  for (int q : {2, 4, 5}) CHECK(duality_gap(2.9, q).gap <= 1e-6);
}

TEST_CASE("free energy") {
  CHECK(free_energy(1.0, 3) == doctest::Approx(-1.0 / 3).epsilon(1e-14));
  CHECK_THROWS_AS(free_energy(0.0, 3), ParameterError);
}
