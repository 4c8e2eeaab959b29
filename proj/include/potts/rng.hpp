#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter, lane), so replicas never share state and results do
// not depend on how work is scheduled across threads.

#include <array>
#include <cstdint>

namespace potts {

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;  // replica index
};

/// Philox4x32-10 (Salmon et al., SC'11).
class CounterRng {
 public:
  explicit CounterRng(RngSpec spec) : spec_(spec) {}

  const RngSpec& spec() const noexcept { return spec_; }

  /// 128 random bits for (counter, lane).
  std::array<std::uint64_t, 2> bits(std::uint64_t counter, std::uint32_t lane = 0) const {
    std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(counter),
                                     static_cast<std::uint32_t>(counter >> 32), spec_.stream, lane};
    std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(spec_.seed),
                                     static_cast<std::uint32_t>(spec_.seed >> 32)};
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return {(std::uint64_t{ctr[0]} << 32) | ctr[1], (std::uint64_t{ctr[2]} << 32) | ctr[3]};
  }

  /// Uniform double in [0, 1) with 53 random bits.
  static double to_unit(std::uint64_t r) { return static_cast<double>(r >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by multiply-shift.
  static std::uint64_t to_index(std::uint64_t r, std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(r) * bound) >> 64);
  }

 private:
  RngSpec spec_;
};

/// Lanes partition the counter space by purpose.
namespace lanes {
inline constexpr std::uint32_t dynamics = 0;
inline constexpr std::uint32_t dynamics_extra = 1;
inline constexpr std::uint32_t initial_state = 2;
inline constexpr std::uint32_t sampling = 3;
}  // namespace lanes

/// Sequential convenience wrapper over CounterRng for setup code
/// (initial states, sampled test points).
class RngStream {
 public:
  RngStream(RngSpec spec, std::uint32_t lane) : rng_(spec), lane_(lane) {}

  double uniform() { return CounterRng::to_unit(next()); }
  std::uint64_t index(std::uint64_t bound) { return CounterRng::to_index(next(), bound); }
  std::uint64_t next() {
    if (!have_spare_) {
      buf_ = rng_.bits(counter_++, lane_);
      have_spare_ = true;
      return buf_[0];
    }
    have_spare_ = false;
    return buf_[1];
  }

 private:
  CounterRng rng_;
  std::uint32_t lane_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  bool have_spare_ = false;
};

}  // namespace potts
