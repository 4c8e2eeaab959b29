#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "oracle_values.hpp"
#include "potts/error.hpp"
#include "potts/gibbs_exact.hpp"
#include "potts/glauber.hpp"

using namespace potts;

TEST_CASE("g map against the oracle") {
  const ProbVector g = g_map(ProbVector::vertex(3, 0), 2.0);
  CHECK(g[0] == doctest::Approx(oracle::g_q3_beta2_e1_first).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(oracle::g_q3_beta2_e1_rest).epsilon(1e-15));
  CHECK(g[2] == doctest::Approx(oracle::g_q3_beta2_e1_rest).epsilon(1e-15));
  CHECK(g_map(ProbVector({0.9, 0.1}), 0.0) == ProbVector::uniform(2));
  // no overflow at large beta
  const ProbVector sharp = g_map(ProbVector::vertex(4, 2), 5000.0);
  CHECK(sharp[2] == doctest::Approx(1.0));
}

TEST_CASE("jacobian at rho") {
  const double beta = 1.7;
  const auto j = g_jacobian(ProbVector::uniform(3), beta);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t m = 0; m < 3; ++m)
      CHECK(j[k * 3 + m] == doctest::Approx(k == m ? beta * 2.0 / 9.0 : -beta / 9.0).epsilon(1e-15));
}

TEST_CASE("update law is g of the opposite magnetization") {
  const ModelParams p(3, 4, 1.3);
  const ChainState s(BipartiteConfig(SpinConfig(3, {0, 0, 1, 2}), SpinConfig(3, {2, 2, 2, 1})));
  CHECK(update_distribution(p, s, Side::left, 1) == g_map(ProbVector({0.0, 0.25, 0.75}), 1.3));
  CHECK(update_distribution(p, s, Side::right, 3) == g_map(ProbVector({0.5, 0.25, 0.25}), 1.3));
  CHECK_THROWS_AS(update_distribution(p, s, Side::left, 4), ParameterError);

  const ModelParams one(2, 1, 0.7);
  const ChainState aligned(BipartiteConfig::constant(2, 1, 0));
  const ProbVector law = update_distribution(one, aligned, Side::left, 0);
  CHECK(law[0] == doctest::Approx(std::exp(0.7) / (std::exp(0.7) + 1.0)).epsilon(1e-15));
  const ProbVector exact = conditional_update_exact(one, aligned.config, Side::left, 0);
  CHECK(std::abs(law[0] - exact[0]) <= 1e-15);
}

TEST_CASE("kernel from update laws equals the exact heat-bath kernel") {
  for (auto [q, n] : {std::pair{2, 2}, {3, 2}, {2, 3}, {3, 3}}) {
    for (double beta : {0.0, 0.5, 1.5, 4.0}) {
      const ModelParams p(q, n, beta);
      CHECK(max_entry_difference(exact_glauber_kernel(p), glauber_kernel_from_update_laws(p)) <= 1e-14);
    }
  }
}

TEST_CASE("weight table and inverse-CDF sampling") {
  const ModelParams p(3, 10, 2.0);
  const auto t = update_weight_table(p);
  REQUIRE(t.size() == 11);
  CHECK(t[10] == 1.0);
  for (int c = 0; c < 10; ++c) CHECK(t[static_cast<std::size_t>(c)] == doctest::Approx(std::exp(2.0 * (c - 10) / 10.0)));

  const std::vector<double> w{1.0, 0.0, 3.0};
  CHECK(sample_spin(w, 0.0) == 0);
  CHECK(sample_spin(w, 0.2499) == 0);
  CHECK(sample_spin(w, 0.2501) == 2);
  CHECK(sample_spin(w, 0.9999999) == 2);
}

TEST_CASE("sampled spins follow the update law (chi-square)") {
  const ModelParams p(4, 8, 1.9);
  const ChainState s(BipartiteConfig(SpinConfig(4, {0, 0, 0, 1, 1, 2, 3, 3}), SpinConfig(4, {0, 1, 1, 1, 1, 1, 2, 3})));
  const ProbVector law = update_distribution(p, s, Side::left, 0);
  const auto table = update_weight_table(p);
  double w[4];
  for (int k = 0; k < 4; ++k) w[k] = table[static_cast<std::size_t>(s.mags.right[k])];
  RngStream rng({11, 0}, lanes::sampling);
  const int reps = 100000;
  int counts[4] = {0, 0, 0, 0};
  for (int r = 0; r < reps; ++r) ++counts[sample_spin({w, 4}, rng.uniform())];
  double chi2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double e = reps * law[k];
    chi2 += (counts[k] - e) * (counts[k] - e) / e;
  }
  // 3 degrees of freedom: P(chi2 > 16.27) = 0.001
  CHECK(chi2 < 16.27);
}

TEST_CASE("chain keeps its cached magnetizations") {
  const ModelParams p(3, 30, 2.0);
  GlauberChain chain(p, {5, 0}, initial_config(p, "uniform", {5, 0}));
  for (int i = 0; i < 20; ++i) {
    chain.advance(500);
    CHECK_NOTHROW(check_invariants(chain.state()));
  }
  CHECK(chain.state().step == 10000);
}

TEST_CASE("trajectories are reproducible") {
  const ModelParams p(3, 20, 1.0);
  const BipartiteConfig x0 = initial_config(p, "ordered:2", {1, 0});
  CHECK(x0 == BipartiteConfig::constant(3, 20, 2));
  GlauberChain a(p, {77, 3}, x0);
  GlauberChain b(p, {77, 3}, x0);
  const auto ta = a.run(1000, 100);
  const auto tb = b.run(1000, 100);
  REQUIRE(ta.size() == 11);
  for (std::size_t i = 0; i < ta.size(); ++i) {
    CHECK(ta[i].step == 100 * i);
    CHECK(ta[i].mags == tb[i].mags);
  }
  GlauberChain c(p, {78, 3}, x0);
  c.advance(1000);
  CHECK_FALSE(c.state().config == a.state().config);
  CHECK_THROWS_AS(initial_config(p, "ordered:3", {1, 0}), ParameterError);
  CHECK_THROWS_AS(initial_config(p, "sideways", {1, 0}), ParameterError);
}

TEST_CASE("configuration files") {
  const auto path = std::filesystem::temp_directory_path() / "potts_cfg_test.txt";
  {
    std::ofstream f(path);
    f << "0 1 2 2\n1 1 0 2\n";
  }
  const BipartiteConfig c = read_config_file(path.string(), 3);
  CHECK(c.left() == SpinConfig(3, {0, 1, 2, 2}));
  CHECK(c.right() == SpinConfig(3, {1, 1, 0, 2}));
  CHECK_THROWS_AS(read_config_file(path.string(), 2), ParameterError);
  {
    std::ofstream f(path);
    f << "0 1 2 2\n";
  }
  CHECK_THROWS_AS(read_config_file(path.string(), 3), ParameterError);
  std::filesystem::remove(path);
}

TEST_CASE("subcritical chain concentrates at rho") {
  const ModelParams p(3, 512, 1.0);
  GlauberChain chain(p, {2, 0}, initial_config(p, "uniform", {2, 0}));
  chain.advance(100000);
  double avg[3] = {0, 0, 0};
  const int samples = 1000;
  for (int i = 0; i < samples; ++i) {
    chain.advance(1000);
    for (int k = 0; k < 3; ++k) avg[k] += chain.state().mags.left[k] / 512.0 / samples;
  }
  for (double v : avg) CHECK(std::abs(v - 1.0 / 3) <= 0.02);
}
