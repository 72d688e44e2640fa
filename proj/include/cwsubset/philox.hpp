#pragma once

// Philox4x64-10 counter-based generator (Salmon et al., SC'11), matching
// the Random123 reference implementation bit for bit.

#include <array>
#include <cstdint>

#include "cwsubset/detail/int128.hpp"

namespace cwsubset {

inline constexpr const char* kRngName = "philox4x64-10";

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

namespace detail {

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const u128 p = static_cast<u128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace detail

inline PhiloxCounter philox4x64_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    detail::mulhilo(kM0, ctr[0], hi0, lo0);
    detail::mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

// Uniform double in [0, 1) with 53 random bits.
inline double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

// Sequential view of the counter space {c0 = 0, 1, 2, ...} x {c1, c2, c3}
// under a fixed key.
class PhiloxStream {
 public:
  PhiloxStream(PhiloxKey key, std::uint64_t c1, std::uint64_t c2, std::uint64_t c3)
      : key_(key), ctr_{0, c1, c2, c3} {}

  std::uint64_t next() {
    if (pos_ == 4) {
      block_ = philox4x64_10(ctr_, key_);
      ++ctr_[0];
      pos_ = 0;
    }
    return block_[pos_++];
  }

  // Exactly uniform integer in [0, bound), bound > 0 (Lemire's method).
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t hi, lo;
    detail::mulhilo(next(), bound, hi, lo);
    if (lo < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) detail::mulhilo(next(), bound, hi, lo);
    }
    return hi;
  }

 private:
  PhiloxKey key_;
  PhiloxCounter ctr_;
  PhiloxCounter block_{};
  int pos_ = 4;
};

}  // namespace cwsubset
