#include "potts/lattice.hpp"

#include <limits>

#include "potts/error.hpp"

namespace potts {

std::uint64_t composition_count(int q, int n) {
  // C(n + q - 1, q - 1) built incrementally; each partial product is itself a binomial.
  unsigned __int128 c = 1;
  for (int i = 1; i <= q - 1; ++i) {
    c = c * static_cast<unsigned>(n + i) / static_cast<unsigned>(i);
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(c);
}

namespace {

void enumerate(int q, int k, int remaining, std::vector<int>& current, std::vector<int>& out) {
  if (k == q - 1) {
    current[static_cast<std::size_t>(k)] = remaining;
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    current[static_cast<std::size_t>(k)] = v;
    enumerate(q, k + 1, remaining - v, current, out);
  }
}

}  // namespace

CompositionIndex::CompositionIndex(int q, int n) : q_(q), n_(n) {
  if (q < 2 || n < 1) throw ParameterError("composition index needs q >= 2 and n >= 1");
  const std::uint64_t total = composition_count(q, n);
  if (total > (1ULL << 26)) {
    throw FeasibilityError("lattice simplex too large to index", 1ULL << 26);
  }
  points_.reserve(static_cast<std::size_t>(total) * static_cast<std::size_t>(q));
  std::vector<int> current(static_cast<std::size_t>(q), 0);
  enumerate(q, 0, n, current, points_);

  const auto stride = static_cast<std::size_t>(n + 1);
  tail_.assign(static_cast<std::size_t>(q + 1) * stride, 0);
  for (int r = 1; r <= q; ++r) {
    for (int m = 0; m <= n; ++m) tail_[static_cast<std::size_t>(r) * stride + m] = composition_count(r, m);
  }
}

LatticePoint CompositionIndex::point(std::size_t index) const {
  auto c = counts(index);
  return LatticePoint(std::vector<int>(c.begin(), c.end()));
}

std::size_t CompositionIndex::rank(std::span<const int> counts) const {
  if (counts.size() != static_cast<std::size_t>(q_)) throw DimensionError("rank: wrong q");
  const auto stride = static_cast<std::size_t>(n_ + 1);
  std::uint64_t r = 0;
  int remaining = n_;
  for (int k = 0; k + 1 < q_; ++k) {
    const int parts_after = q_ - k - 1;
    if (counts[static_cast<std::size_t>(k)] < 0 || counts[static_cast<std::size_t>(k)] > remaining) {
      throw DimensionError("rank: counts do not sum to n");
    }
    for (int v = 0; v < counts[static_cast<std::size_t>(k)]; ++v) {
      r += tail_[static_cast<std::size_t>(parts_after) * stride + static_cast<std::size_t>(remaining - v)];
    }
    remaining -= counts[static_cast<std::size_t>(k)];
  }
  if (remaining != counts[static_cast<std::size_t>(q_ - 1)]) {
    throw DimensionError("rank: counts do not sum to n");
  }
  return static_cast<std::size_t>(r);
}

}  // namespace potts
