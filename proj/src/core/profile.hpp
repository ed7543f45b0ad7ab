#pragma once

#include <optional>
#include <span>

#include "core/ea.hpp"
#include "core/journey.hpp"
#include "core/packed_time.hpp"
#include "core/timetable.hpp"

namespace connscan {

constexpr int kLegMaxLimit = 31;
constexpr int kDefaultLegMax = 8;

// Arrival vector A[1..leg_max]; A[l] = earliest arrival with at most l legs.
// Components never increase with l.
struct ParetoVec {
  uint32_t a[kLegMaxLimit + 1];  // 1-based, a[0] unused
  int n = 0;

  static ParetoVec all_inf(int leg_max) {
    ParetoVec v;
    v.n = leg_max;
    for (int i = 0; i <= leg_max; ++i) v.a[i] = PackedTime::kInf;
    return v;
  }
  static ParetoVec broadcast(int leg_max, uint32_t x) {
    ParetoVec v;
    v.n = leg_max;
    v.a[0] = PackedTime::kInf;
    for (int i = 1; i <= leg_max; ++i) v.a[i] = x;
    return v;
  }
  uint32_t operator[](int i) const { return a[i]; }
  bool operator==(const ParetoVec& o) const {
    if (n != o.n) return false;
    for (int i = 1; i <= n; ++i)
      if (a[i] != o.a[i]) return false;
    return true;
  }
  bool is_inf() const {
    for (int i = 1; i <= n; ++i)
      if (a[i] != PackedTime::kInf) return false;
    return true;
  }
};

inline ParetoVec vec_min(const ParetoVec& x, const ParetoVec& y) {
  ParetoVec r;
  r.n = x.n;
  r.a[0] = PackedTime::kInf;
  for (int i = 1; i <= x.n; ++i) r.a[i] = x.a[i] < y.a[i] ? x.a[i] : y.a[i];
  return r;
}

// B[1] = inf, B[i] = A[i-1]; the modified form folds A[leg_max] into the last
// component so it holds the unconstrained earliest arrival.
ParetoVec vector_shift(const ParetoVec& a, bool modified);

struct ProfileOptions {
  std::optional<StopId> source;   // enables the source-based pruning below
  TimeSec source_time = 0;
  bool limited_walking = true;
  bool source_domination = false;
  // scalar mode only:
  bool leg_tiebreak = false;   // add one leg per profile evaluation
  unsigned rounding_bits = 0;  // r of the packed layout
  // pareto mode only:
  int leg_max = kDefaultLegMax;
  bool modified_shift = false;
  // scan restriction (used by range queries and the overlay):
  ConnId window_first = 0;
  ConnId window_last = kInvalidId;
  std::optional<TimeSec> max_arrival;           // drop options arriving later
  const EaState* reachable_trips = nullptr;     // skip connections of unmarked trips
  std::span<const ConnId> restrict_to = {};     // scan only these ids (sorted)
};

struct ScalarEntry {
  TimeSec dep;
  uint32_t val;  // packed arrival
};

struct ParetoEntry {
  TimeSec dep;
  ParetoVec val;
};

// Per-stop profiles are stored back to front (front of the profile = last
// element) so the scan's front insertions are O(1) amortized pushes.
template <typename Entry>
class StopProfiles {
 public:
  explicit StopProfiles(size_t stops) : rev_(stops) {}

  // entries in logical order: increasing departure time
  std::vector<Entry> entries(StopId s) const {
    return {rev_[s].rbegin(), rev_[s].rend()};
  }
  const std::vector<Entry>& reversed(StopId s) const { return rev_[s]; }
  std::vector<Entry>& reversed(StopId s) { return rev_[s]; }
  size_t size(StopId s) const { return rev_[s].size(); }

 private:
  std::vector<std::vector<Entry>> rev_;
};

struct ScanStats {
  uint64_t scanned = 0;
  uint64_t rewrite_window = 0;  // entries temporarily removed by front-window rewrites
};

struct ScalarProfile {
  StopProfiles<ScalarEntry> stops;
  std::vector<uint32_t> trip_val;
  std::vector<std::pair<StopId, TimeSec>> walk_to_target;  // sparse D, sorted by stop
  StopId target;
  unsigned rounding_bits = 0;
  bool leg_tiebreak = false;
  ScanStats stats;

  TimeSec walk(StopId s) const;
  ScalarProfile(size_t nstops, size_t ntrips, StopId t)
      : stops(nstops), trip_val(ntrips, PackedTime::kInf), target(t) {}
};

struct ParetoProfile {
  StopProfiles<ParetoEntry> stops;
  std::vector<ParetoVec> trip_val;
  std::vector<std::pair<StopId, TimeSec>> walk_to_target;
  StopId target;
  int leg_max;
  bool modified_shift = false;
  ScanStats stats;

  TimeSec walk(StopId s) const;
  ParetoProfile(size_t nstops, size_t ntrips, StopId t, int lm)
      : stops(nstops), trip_val(ntrips, ParetoVec::all_inf(lm)), target(t), leg_max(lm) {}
};

// Evaluation: value of the earliest entry departing at or after tau.
// Sequential scan from the front; the binary-search form exists for tests.
uint32_t evaluate_scalar(const std::vector<ScalarEntry>& reversed, TimeSec tau);
uint32_t evaluate_scalar_binary(const std::vector<ScalarEntry>& reversed, TimeSec tau);
ParetoVec evaluate_pareto(const std::vector<ParetoEntry>& reversed, TimeSec tau, int leg_max);

// All-to-one profile scans over connections decreasing by departure time.
ScalarProfile ea_profile(const Timetable& tt, StopId target, const ProfileOptions& opts = {});
ParetoProfile pareto_profile(const Timetable& tt, StopId target, int leg_max,
                             const ProfileOptions& opts = {});

struct RangeResult {
  bool reachable = false;
  TimeSec earliest_arrival = kInfTime;
  TimeSec max_arrival = kInfTime;  // source_time + 2 * (eat - source_time)
  std::optional<ScalarProfile> scalar;
  std::optional<ParetoProfile> pareto;
  uint64_t prescan_count = 0;
};

// Forward scan fixes the horizon and the reachable trips, then a profile scan
// runs backward over the same window.
RangeResult range_query(const Timetable& tt, StopId source, TimeSec source_time, StopId target,
                        bool pareto, const ProfileOptions& opts = {});

// Pointerless journey extraction from a profile. leg_limit applies in pareto
// mode. Throws std::logic_error if the profile promises a leg it cannot back.
Journey extract_profile_journey(const Timetable& tt, const AuxIndexes& aux,
                                const ScalarProfile& prof, StopId source, TimeSec source_time);
Journey extract_profile_journey(const Timetable& tt, const AuxIndexes& aux,
                                const ParetoProfile& prof, StopId source, TimeSec source_time,
                                int leg_limit);

}  // namespace connscan
