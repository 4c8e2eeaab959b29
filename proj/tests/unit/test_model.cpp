#include <cmath>
#include <set>

#include "doctest.h"
#include "potts/error.hpp"
#include "potts/lattice.hpp"
#include "potts/model.hpp"
#include "potts/rng.hpp"

using namespace potts;

TEST_CASE("magnetization counts spins per value") {
  const SpinConfig s(3, {1, 1, 0, 2, 1});
  const LatticePoint m = magnetization(s);
  CHECK(m[0] == 1);
  CHECK(m[1] == 3);
  CHECK(m[2] == 1);
  CHECK(m.n() == 5);
  CHECK(m.proportions()[1] == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("hamiltonian is exact and matches the double sum") {
  const BipartiteConfig c(SpinConfig(2, {0, 1}), SpinConfig(2, {0, 0}));
  CHECK(hamiltonian_exact(c) == Rational{-1, 1});
  CHECK(hamiltonian(c) == -1.0);

  // brute force double sum over all pairs for a random-looking config
  const SpinConfig l(3, {0, 2, 2, 1, 0, 2, 1});
  const SpinConfig r(3, {2, 2, 0, 1, 1, 0, 2});
  int same = 0;
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) same += l[i] == r[j];
  CHECK(hamiltonian_exact(BipartiteConfig(l, r)) == Rational::make(-same, 7));
}

TEST_CASE("interaction function and distances") {
  const ProbVector x({0.5, 0.5, 0.0});
  const ProbVector y({0.2, 0.3, 0.5});
  CHECK(interaction_h(x, y) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(l1_distance(x, y) == doctest::Approx(1.0).epsilon(1e-15));

  const BipartiteConfig a(SpinConfig(3, {0, 1, 2}), SpinConfig(3, {1, 1, 1}));
  const BipartiteConfig b(SpinConfig(3, {0, 2, 2}), SpinConfig(3, {0, 0, 1}));
  CHECK(config_distance(a, b) == 3);
}

TEST_CASE("value types reject malformed input") {
  CHECK_THROWS_AS(ModelParams(1, 3, 1.0), ParameterError);
  CHECK_THROWS_AS(ModelParams(3, 0, 1.0), ParameterError);
  CHECK_THROWS_AS(ModelParams(3, 2, -0.1), ParameterError);
  CHECK_THROWS_AS(ModelParams(3, 2, std::nan("")), ParameterError);
  CHECK_THROWS_AS(SpinConfig(3, {0, 3}), ParameterError);
  CHECK_THROWS_AS(BipartiteConfig(SpinConfig(3, {0, 1}), SpinConfig(3, {0})), DimensionError);
  CHECK_THROWS_AS(ProbVector({0.5, 0.6}), ParameterError);
  CHECK_THROWS_AS(ProbVector({1.5, -0.5}), ParameterError);
  CHECK_THROWS_AS(LatticePoint({-1, 2}), ParameterError);

  const ProbVector p({0.5, 0.5 + 1e-13});
  CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-16));
}

TEST_CASE("rationals are reduced") {
  CHECK(Rational::make(6, -4) == Rational{-3, 2});
  CHECK(Rational::make(0, 5) == Rational{0, 1});
  CHECK_THROWS_AS(Rational::make(1, 0), ParameterError);
}

TEST_CASE("composition index ranks every lattice point") {
  for (auto [q, n] : {std::pair{2, 5}, {3, 6}, {4, 3}, {5, 4}}) {
    const CompositionIndex idx(q, n);
    CHECK(idx.size() == composition_count(q, n));
    std::set<std::vector<int>> seen;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto c = idx.counts(i);
      int total = 0;
      for (int v : c) total += v;
      CHECK(total == n);
      CHECK(idx.rank(c) == i);
      seen.insert({c.begin(), c.end()});
    }
    CHECK(seen.size() == idx.size());
  }
  CHECK(composition_count(3, 6) == 28);
}

TEST_CASE("philox matches the published known-answer vectors") {
  // counter words (c0, c1, c2, c3) = (counter lo, counter hi, stream, lane), key = seed
  const auto words = [](std::array<std::uint64_t, 2> b) {
    return std::array<std::uint32_t, 4>{static_cast<std::uint32_t>(b[0] >> 32), static_cast<std::uint32_t>(b[0]),
                                        static_cast<std::uint32_t>(b[1] >> 32), static_cast<std::uint32_t>(b[1])};
  };
  CHECK(words(CounterRng({0, 0}).bits(0, 0)) ==
        std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(words(CounterRng({~0ULL, ~0u}).bits(~0ULL, ~0u)) ==
        std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(words(CounterRng({0x299f31d0a4093822ULL, 0x13198a2eu}).bits(0x85a308d3243f6a88ULL, 0x03707344u)) ==
        std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter streams are reproducible and independent of draw order") {
  RngStream a({42, 7}, lanes::dynamics);
  RngStream b({42, 7}, lanes::dynamics);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  RngStream c({42, 8}, lanes::dynamics);
  RngStream d({42, 7}, lanes::dynamics);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += c.next() == d.next();
  CHECK(equal == 0);

  RngStream u({1, 0}, lanes::sampling);
  double mean = 0.0;
  int outside = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    outside += !(x >= 0.0 && x < 1.0);
    mean += x;
  }
  CHECK(outside == 0);
  CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
}
