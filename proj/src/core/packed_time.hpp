#pragma once

#include <cstdint>

#include "core/types.hpp"

namespace connscan {

// 32-bit arrival value carrying three criteria in comparison order: rounded
// arrival time, leg count, exact arrival time. Layout, low to high bit:
//   [r bits: arrival low bits][5 bits: legs][27-r bits: arrival high bits]
// r = 0 disables rounding (plain "scale by 32, epsilon = 1" form). Integer
// order on packed values is lexicographic on (arr >> r, legs, arr & mask).
struct PackedTime {
  static constexpr uint32_t kInf = 0xffffffffu;
  static constexpr TimeSec kMaxArrival = (TimeSec{1} << 27) - 1;
  static constexpr unsigned kMaxLegs = 31;

  static uint32_t pack(TimeSec arrival, unsigned legs, unsigned r) {
    uint64_t a = static_cast<uint64_t>(arrival);
    uint64_t low = a & ((uint64_t{1} << r) - 1);
    uint64_t high = a >> r;
    return static_cast<uint32_t>((high << (5 + r)) | (static_cast<uint64_t>(legs) << r) | low);
  }

  static TimeSec arrival(uint32_t v, unsigned r) {
    uint64_t low = v & ((uint64_t{1} << r) - 1);
    uint64_t high = static_cast<uint64_t>(v) >> (5 + r);
    return static_cast<TimeSec>((high << r) | low);
  }

  static unsigned legs(uint32_t v, unsigned r) { return (v >> r) & 0x1fu; }

  // one more leg = epsilon per profile evaluation
  static uint32_t leg_increment(unsigned r) { return uint32_t{1} << r; }

  static bool fits(TimeSec arrival, unsigned legs) {
    return arrival >= 0 && arrival <= kMaxArrival && legs <= kMaxLegs;
  }
};

}  // namespace connscan
