#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/timetable.hpp"

namespace connscan {

struct JourneyLeg {
  ConnId enter;
  ConnId exit;
};

// Alternating footpaths and legs: fp[0], leg[0], fp[1], ..., leg[k-1], fp[k].
// Footpaths are stored by value. A journey with zero legs is a single footpath.
struct Journey {
  std::vector<Footpath> footpaths;
  std::vector<JourneyLeg> legs;

  size_t leg_count() const { return legs.size(); }
  StopId dep_stop() const { return footpaths.front().dep_stop; }
  StopId arr_stop() const { return footpaths.back().arr_stop; }

  TimeSec dep_time(const Timetable& tt) const {
    if (legs.empty()) return 0;  // a pure footpath has no anchored departure
    return tt.conn(legs.front().enter).dep_time - footpaths.front().dur;
  }
  TimeSec arr_time(const Timetable& tt) const {
    if (legs.empty()) return footpaths.front().dur;  // relative to departure
    return tt.conn(legs.back().exit).arr_time + footpaths.back().dur;
  }
};

// Replays the journey against the timetable: leg/footpath alternation, trip
// membership, transfer feasibility, and stop/trip uniqueness. Returns an error
// description, or nothing if the journey is well formed.
std::optional<std::string> check_journey(const Timetable& tt, const Journey& j);

std::string format_journey(const Timetable& tt, const Journey& j);

}  // namespace connscan
