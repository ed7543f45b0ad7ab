#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace connscan {

struct Stop {
  TimeSec change_time = 0;  // duration of the loop footpath
  std::string name;
};

struct Connection {
  StopId dep_stop;
  StopId arr_stop;
  TimeSec dep_time;
  TimeSec arr_time;
  TripId trip;
};

struct Footpath {
  StopId dep_stop;
  StopId arr_stop;
  TimeSec dur;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

struct Violation {
  std::string kind;
  std::string detail;
};

using ValidationReport = std::vector<Violation>;

// Connections are kept sorted by departure time; ties keep input order so that
// id assignment is reproducible bit for bit across loads.
class Timetable {
 public:
  static Timetable build(std::vector<Stop> stops, std::vector<Connection> conns,
                         size_t trip_count, std::vector<Footpath> interstop_footpaths,
                         bool synthesize_closure = false);

  size_t stop_count() const { return stops_.size(); }
  size_t trip_count() const { return trips_.size(); }
  size_t connection_count() const { return conns_.size(); }
  size_t interstop_footpath_count() const { return interstop_fp_count_; }

  const Stop& stop(StopId s) const { return stops_[s]; }
  TimeSec change_time(StopId s) const { return stops_[s].change_time; }
  const Connection& conn(ConnId c) const { return conns_[c]; }
  std::span<const Connection> connections() const { return conns_; }
  std::span<const ConnId> trip_connections(TripId t) const { return trips_[t]; }
  uint32_t trip_position(ConnId c) const { return trip_pos_[c]; }

  // Adjacency includes the loop footpath of every stop.
  std::span<const Footpath> footpaths_from(StopId s) const {
    return {fp_out_.data() + fp_out_begin_[s], fp_out_begin_[s + 1] - fp_out_begin_[s]};
  }
  std::span<const Footpath> footpaths_to(StopId s) const {
    return {fp_in_.data() + fp_in_begin_[s], fp_in_begin_[s + 1] - fp_in_begin_[s]};
  }

  // Single-edge transfer relation: a@ta -> b@tb.
  bool transfer_reachable(StopId a, TimeSec ta, StopId b, TimeSec tb) const;

  // First connection with dep_time >= t.
  ConnId first_connection_not_before(TimeSec t) const;

  ValidationReport validate() const;

  std::string to_text() const;
  uint64_t content_hash() const;

 private:
  std::vector<Stop> stops_;
  std::vector<Connection> conns_;
  std::vector<std::vector<ConnId>> trips_;
  std::vector<uint32_t> trip_pos_;
  std::vector<Footpath> fp_out_;
  std::vector<uint32_t> fp_out_begin_;
  std::vector<Footpath> fp_in_;
  std::vector<uint32_t> fp_in_begin_;
  size_t interstop_fp_count_ = 0;
};

// Text format, one record per line, '#' comments:
//   S <stop_id> <change_time_s> [name]
//   T <trip_id>
//   C <trip_id> <dep_stop> <arr_stop> <dep_time_s> <arr_time_s>
//   F <dep_stop> <arr_stop> <dur_s>
Timetable load_timetable_text(const std::string& text, bool synthesize_closure = false);
Timetable load_timetable_file(const std::string& path, bool synthesize_closure = false);

struct AuxIndexes {
  // trip id -> connection ids in trip order
  std::vector<std::vector<ConnId>> connections_by_trip;
  // stop id -> connection ids arriving there, sorted by arr_time
  std::vector<std::vector<ConnId>> connections_by_arrival;
  // stop id -> connection ids departing there, sorted by dep_time
  std::vector<std::vector<ConnId>> connections_by_departure;

  std::span<const ConnId> arrivals_at(StopId s) const { return connections_by_arrival[s]; }
  std::span<const ConnId> departures_at(StopId s) const { return connections_by_departure[s]; }
};

AuxIndexes build_aux_indexes(const Timetable& tt);

uint64_t fnv1a(const void* data, size_t n, uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace connscan
