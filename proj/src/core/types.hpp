#pragma once

#include <cstdint>
#include <limits>

namespace connscan {

using StopId = uint32_t;
using TripId = uint32_t;
using ConnId = uint32_t;
using TimeSec = int64_t;

constexpr uint32_t kInvalidId = std::numeric_limits<uint32_t>::max();

// Large enough to act as +inf, small enough that inf + duration does not wrap.
constexpr TimeSec kInfTime = std::numeric_limits<int64_t>::max() / 4;

inline TimeSec add_time(TimeSec a, TimeSec b) {
  return (a >= kInfTime || b >= kInfTime) ? kInfTime : a + b;
}

}  // namespace connscan
