#include "core/journey.hpp"

#include <set>
#include <sstream>

namespace connscan {

std::optional<std::string> check_journey(const Timetable& tt, const Journey& j) {
  if (j.footpaths.size() != j.legs.size() + 1) return "footpath/leg alternation broken";
  std::set<StopId> stops_seen;
  std::set<TripId> trips_seen;

  for (size_t i = 0; i < j.footpaths.size(); ++i) {
    const auto& f = j.footpaths[i];
    bool found = false;
    for (const auto& g : tt.footpaths_from(f.dep_stop))
      if (g.arr_stop == f.arr_stop && g.dur == f.dur) found = true;
    if (!found) return "footpath not in timetable";
    if (i < j.legs.size() && f.arr_stop != tt.conn(j.legs[i].enter).dep_stop)
      return "footpath does not reach the next leg";
  }

  // visited = transfer points, not stops ridden through inside a leg
  stops_seen.insert(j.footpaths.front().dep_stop);
  for (size_t i = 0; i < j.legs.size(); ++i) {
    const auto& enter = tt.conn(j.legs[i].enter);
    const auto& exit = tt.conn(j.legs[i].exit);
    if (enter.trip != exit.trip) return "leg spans two trips";
    if (tt.trip_position(j.legs[i].enter) > tt.trip_position(j.legs[i].exit))
      return "leg enters after it exits";
    if (exit.arr_stop != j.footpaths[i + 1].dep_stop) return "leg does not reach its footpath";
    if (!trips_seen.insert(enter.trip).second) return "trip visited twice";

    if (enter.dep_stop != j.footpaths[i].arr_stop) return "leg does not start at its footpath";
    if (j.footpaths[i].dep_stop != j.footpaths[i].arr_stop &&
        !stops_seen.insert(enter.dep_stop).second)
      return "stop visited twice";
    if (!stops_seen.insert(exit.arr_stop).second) return "stop visited twice";

    if (i + 1 < j.legs.size()) {
      const auto& next = tt.conn(j.legs[i + 1].enter);
      if (!tt.transfer_reachable(exit.arr_stop, exit.arr_time, next.dep_stop, next.dep_time))
        return "infeasible transfer";
    }
  }
  if (!j.legs.empty() && j.footpaths.back().dep_stop != j.footpaths.back().arr_stop) {
    if (!stops_seen.insert(j.footpaths.back().arr_stop).second) return "stop visited twice";
  }
  return std::nullopt;
}

std::string format_journey(const Timetable& tt, const Journey& j) {
  std::ostringstream os;
  if (j.legs.empty()) {
    os << "walk " << j.footpaths.front().dep_stop << " -> " << j.footpaths.front().arr_stop
       << " (" << j.footpaths.front().dur << "s)\n";
    return os.str();
  }
  for (size_t i = 0; i < j.legs.size(); ++i) {
    const auto& enter = tt.conn(j.legs[i].enter);
    const auto& exit = tt.conn(j.legs[i].exit);
    os << enter.dep_stop << ' ' << enter.dep_time << " -> " << exit.arr_stop << ' ' << exit.arr_time
       << " (" << enter.trip << ")\n";
  }
  return os.str();
}

}  // namespace connscan
