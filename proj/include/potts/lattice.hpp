#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "potts/model.hpp"

namespace potts {

/// Number of compositions of n into q nonnegative parts, C(n+q-1, q-1).
/// Saturates at UINT64_MAX.
std::uint64_t composition_count(int q, int n);

/// Dense indexing of the lattice simplex P_n (compositions of n into q parts)
/// in lexicographic order of the count vectors.
class CompositionIndex {
 public:
  CompositionIndex(int q, int n);

  int q() const noexcept { return q_; }
  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return points_.size() / static_cast<std::size_t>(q_); }

  std::span<const int> counts(std::size_t index) const {
    return {points_.data() + index * static_cast<std::size_t>(q_), static_cast<std::size_t>(q_)};
  }
  LatticePoint point(std::size_t index) const;

  std::size_t rank(std::span<const int> counts) const;
  std::size_t rank(const LatticePoint& p) const { return rank(p.counts()); }

 private:
  int q_;
  int n_;
  std::vector<int> points_;
  // tail_[r * (n+1) + m] = number of compositions of m into r parts
  std::vector<std::uint64_t> tail_;
};

}  // namespace potts
