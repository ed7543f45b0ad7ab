#include "core/ea.hpp"

#include <algorithm>
#include <stdexcept>

namespace connscan {

namespace {

void check_stop(const Timetable& tt, StopId s) {
  if (s >= tt.stop_count()) throw std::out_of_range("invalid stop id " + std::to_string(s));
}

void relax_source(const Timetable& tt, EaState& state, StopId source, TimeSec source_time) {
  for (const auto& f : tt.footpaths_from(source)) {
    TimeSec t = source_time + f.dur;
    if (t < state.arrival(f.arr_stop)) state.set_arrival(f.arr_stop, t);
  }
}

}  // namespace

EaResult earliest_arrival(const Timetable& tt, EaState& state, StopId source, TimeSec source_time,
                          StopId target, const EaOptions& opts) {
  check_stop(tt, source);
  if (target != kInvalidId) check_stop(tt, target);

  state.reset();
  relax_source(tt, state, source, source_time);

  EaResult res;
  ConnId first = opts.start_criterion ? tt.first_connection_not_before(source_time) : 0;
  auto conns = tt.connections();
  for (ConnId ci = first; ci < conns.size(); ++ci) {
    const Connection& c = conns[ci];
    if (opts.stop_criterion && target != kInvalidId && state.arrival(target) <= c.dep_time) break;
    ++res.scanned;
    if (c.dep_time < source_time) continue;  // only relevant when the start criterion is off
    if (state.trip_set(c.trip) || state.arrival(c.dep_stop) <= c.dep_time) {
      if (!state.trip_set(c.trip)) state.set_trip(c.trip, ci);
      if (!opts.limited_walking || c.arr_time < state.arrival(c.arr_stop)) {
        for (const auto& f : tt.footpaths_from(c.arr_stop)) {
          TimeSec t = c.arr_time + f.dur;
          if (t < state.arrival(f.arr_stop)) state.set_arrival(f.arr_stop, t);
        }
      }
    }
  }
  if (target != kInvalidId) {
    res.arrival = state.arrival(target);
    res.reachable = res.arrival < kInfTime;
  }
  return res;
}

std::pair<EaResult, std::optional<Journey>> earliest_arrival_with_pointers(
    const Timetable& tt, EaState& state, StopId source, TimeSec source_time, StopId target,
    const EaOptions& opts) {
  check_stop(tt, source);
  check_stop(tt, target);

  state.reset();
  relax_source(tt, state, source, source_time);

  EaResult res;
  ConnId first = opts.start_criterion ? tt.first_connection_not_before(source_time) : 0;
  auto conns = tt.connections();
  for (ConnId ci = first; ci < conns.size(); ++ci) {
    const Connection& c = conns[ci];
    if (opts.stop_criterion && state.arrival(target) <= c.dep_time) break;
    ++res.scanned;
    if (c.dep_time < source_time) continue;
    if (state.trip_set(c.trip) || state.arrival(c.dep_stop) <= c.dep_time) {
      if (!state.trip_set(c.trip)) state.set_trip(c.trip, ci);
      if (!opts.limited_walking || c.arr_time < state.arrival(c.arr_stop)) {
        for (const auto& f : tt.footpaths_from(c.arr_stop)) {
          TimeSec t = c.arr_time + f.dur;
          if (t < state.arrival(f.arr_stop)) {
            state.set_arrival(f.arr_stop, t);
            state.set_pointer(f.arr_stop, {state.trip_conn(c.trip), ci, f});
          }
        }
      }
    }
  }
  res.arrival = state.arrival(target);
  res.reachable = res.arrival < kInfTime;
  if (!res.reachable) return {res, std::nullopt};

  // Backward reconstruction; the tail prepends the initial footpath.
  Journey j;
  StopId at = target;
  std::vector<std::pair<JourneyLeg, Footpath>> rev;
  while (state.pointer(at).valid()) {
    JourneyPointer p = state.pointer(at);
    rev.push_back({{p.enter, p.exit}, p.final_footpath});
    at = tt.conn(p.enter).dep_stop;
  }
  Footpath initial{source, at, 0};
  bool found = false;
  for (const auto& f : tt.footpaths_from(source))
    if (f.arr_stop == at) {
      initial = f;
      found = true;
      break;
    }
  if (!found) throw std::logic_error("pointer chain does not end at a source footpath");
  j.footpaths.push_back(initial);
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    j.legs.push_back(it->first);
    j.footpaths.push_back(it->second);
  }
  return {res, j};
}

Journey extract_journey_stateless(const Timetable& tt, const AuxIndexes& aux, const EaState& state,
                                  StopId source, TimeSec source_time, StopId target) {
  Journey j;
  std::vector<std::pair<JourneyLeg, Footpath>> rev;
  StopId at = target;

  while (true) {
    TimeSec arr = state.arrival(at);
    if (arr >= kInfTime) throw std::logic_error("extracting journey to an unreached stop");

    // A stop whose source footpath explains its arrival needs no leg. Checked
    // first: the pointer variant only overwrites the initial relaxation on a
    // strict improvement, so ties end the chain there too.
    Footpath initial{source, at, 0};
    bool walk_from_source = false;
    for (const auto& f : tt.footpaths_from(source))
      if (f.arr_stop == at && source_time + f.dur == arr) {
        initial = f;
        walk_from_source = true;
        break;
      }
    if (walk_from_source) {
      j.footpaths.push_back(initial);
      break;
    }

    ConnId exit = kInvalidId, enter = kInvalidId;
    Footpath final_fp{};
    for (const auto& f : tt.footpaths_to(at)) {
      TimeSec want = arr - f.dur;
      auto arrivals = aux.arrivals_at(f.dep_stop);
      auto it = std::lower_bound(arrivals.begin(), arrivals.end(), want,
                                 [&](ConnId c, TimeSec v) { return tt.conn(c).arr_time < v; });
      for (; it != arrivals.end() && tt.conn(*it).arr_time == want; ++it) {
        ConnId cand = *it;
        TripId trip = tt.conn(cand).trip;
        if (!state.trip_set(trip)) continue;  // prune: trip never reached
        auto seq = tt.trip_connections(trip);
        for (uint32_t p = 0; p <= tt.trip_position(cand); ++p) {
          const Connection& x = tt.conn(seq[p]);
          if (state.arrival(x.dep_stop) <= x.dep_time) {
            enter = seq[p];
            exit = cand;
            final_fp = f;
            break;
          }
        }
        if (exit != kInvalidId) break;
      }
      if (exit != kInvalidId) break;
    }

    if (exit == kInvalidId)
      throw std::logic_error("no journey pointer can be generated and no source footpath fits");

    rev.push_back({{enter, exit}, final_fp});
    at = tt.conn(enter).dep_stop;
  }

  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    j.legs.push_back(it->first);
    j.footpaths.push_back(it->second);
  }
  return j;
}

void ea_scan_window(const Timetable& tt, EaState& state, StopId source, TimeSec source_time,
                    ConnId first, ConnId last, bool limited_walking) {
  state.reset();
  relax_source(tt, state, source, source_time);
  auto conns = tt.connections();
  last = std::min<ConnId>(last, static_cast<ConnId>(conns.size()));
  for (ConnId ci = first; ci < last; ++ci) {
    const Connection& c = conns[ci];
    if (state.trip_set(c.trip) || state.arrival(c.dep_stop) <= c.dep_time) {
      if (!state.trip_set(c.trip)) state.set_trip(c.trip, ci);
      if (!limited_walking || c.arr_time < state.arrival(c.arr_stop)) {
        for (const auto& f : tt.footpaths_from(c.arr_stop)) {
          TimeSec t = c.arr_time + f.dur;
          if (t < state.arrival(f.arr_stop)) state.set_arrival(f.arr_stop, t);
        }
      }
    }
  }
}

}  // namespace connscan
