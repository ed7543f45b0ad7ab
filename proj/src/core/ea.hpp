#pragma once

#include <optional>

#include "core/journey.hpp"
#include "core/timetable.hpp"

namespace connscan {

struct EaOptions {
  bool start_criterion = true;
  bool stop_criterion = true;
  bool limited_walking = true;
};

struct JourneyPointer {
  ConnId enter = kInvalidId;
  ConnId exit = kInvalidId;
  Footpath final_footpath{kInvalidId, kInvalidId, 0};
  bool valid() const { return enter != kInvalidId; }
};

// Scan state, reusable across queries. Epoch tags make the per-query reset
// O(touched entries) instead of O(stops + trips).
class EaState {
 public:
  explicit EaState(const Timetable& tt)
      : arrival_(tt.stop_count(), kInfTime),
        stop_epoch_(tt.stop_count(), 0),
        trip_conn_(tt.trip_count(), kInvalidId),
        trip_epoch_(tt.trip_count(), 0),
        pointer_(tt.stop_count()),
        epoch_(0) {}

  void reset() { ++epoch_; }

  TimeSec arrival(StopId s) const { return stop_epoch_[s] == epoch_ ? arrival_[s] : kInfTime; }
  void set_arrival(StopId s, TimeSec t) {
    arrival_[s] = t;
    stop_epoch_[s] = epoch_;
  }

  // Earliest reached connection of the trip, or invalid. "Set" in the boolean
  // reading means the id is valid.
  ConnId trip_conn(TripId t) const { return trip_epoch_[t] == epoch_ ? trip_conn_[t] : kInvalidId; }
  bool trip_set(TripId t) const { return trip_conn(t) != kInvalidId; }
  void set_trip(TripId t, ConnId c) {
    trip_conn_[t] = c;
    trip_epoch_[t] = epoch_;
  }

  JourneyPointer pointer(StopId s) const {
    return stop_epoch_[s] == epoch_ ? pointer_[s] : JourneyPointer{};
  }
  void set_pointer(StopId s, const JourneyPointer& p) { pointer_[s] = p; }

 private:
  std::vector<TimeSec> arrival_;
  std::vector<uint32_t> stop_epoch_;
  std::vector<ConnId> trip_conn_;
  std::vector<uint32_t> trip_epoch_;
  std::vector<JourneyPointer> pointer_;
  uint32_t epoch_;
};

struct EaResult {
  TimeSec arrival = kInfTime;
  bool reachable = false;
  uint64_t scanned = 0;  // connections looked at
};

// One-to-one earliest arrival. After the call the state holds tentative
// arrivals and trip records for extraction.
EaResult earliest_arrival(const Timetable& tt, EaState& state, StopId source, TimeSec source_time,
                          StopId target, const EaOptions& opts = {});

// Same scan but with journey pointers; returns the reconstructed journey.
std::pair<EaResult, std::optional<Journey>> earliest_arrival_with_pointers(
    const Timetable& tt, EaState& state, StopId source, TimeSec source_time, StopId target,
    const EaOptions& opts = {});

// Journey reconstruction from a pointerless scan. Candidate exits are found
// through the arrival index, pruned by the trip records, and enter connections
// located by walking the trip prefix.
Journey extract_journey_stateless(const Timetable& tt, const AuxIndexes& aux, const EaState& state,
                                  StopId source, TimeSec source_time, StopId target);

// One-to-all scan over a connection window [first, last); no target pruning.
// Used by range queries and overlay assembly. Trip records mark reached trips.
void ea_scan_window(const Timetable& tt, EaState& state, StopId source, TimeSec source_time,
                    ConnId first, ConnId last, bool limited_walking = true);

}  // namespace connscan
