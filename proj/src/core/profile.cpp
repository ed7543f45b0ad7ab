#include "core/profile.hpp"

#include <algorithm>
#include <stdexcept>

namespace connscan {

namespace {

TimeSec sparse_walk(const std::vector<std::pair<StopId, TimeSec>>& walk, StopId s) {
  auto it = std::lower_bound(walk.begin(), walk.end(), s,
                             [](const auto& p, StopId v) { return p.first < v; });
  if (it != walk.end() && it->first == s) return it->second;
  return kInfTime;
}

std::vector<std::pair<StopId, TimeSec>> target_walk_list(const Timetable& tt, StopId target) {
  std::vector<std::pair<StopId, TimeSec>> walk;
  for (const auto& f : tt.footpaths_to(target)) walk.push_back({f.dep_stop, f.dur});
  std::sort(walk.begin(), walk.end());
  return walk;
}

uint32_t saturating_add(uint32_t v, uint32_t inc) {
  return v >= PackedTime::kInf - inc ? PackedTime::kInf : v + inc;
}

}  // namespace

TimeSec ScalarProfile::walk(StopId s) const { return sparse_walk(walk_to_target, s); }
TimeSec ParetoProfile::walk(StopId s) const { return sparse_walk(walk_to_target, s); }

ParetoVec vector_shift(const ParetoVec& a, bool modified) {
  ParetoVec b;
  b.n = a.n;
  b.a[0] = PackedTime::kInf;
  if (a.n >= 1) b.a[1] = PackedTime::kInf;
  for (int i = 2; i <= a.n; ++i) b.a[i] = a.a[i - 1];
  if (modified && a.n >= 2) b.a[a.n] = std::min(a.a[a.n - 1], a.a[a.n]);
  return b;
}

uint32_t evaluate_scalar(const std::vector<ScalarEntry>& reversed, TimeSec tau) {
  // storage is back to front; walk from the profile front (smallest departure)
  for (size_t i = reversed.size(); i-- > 0;) {
    if (reversed[i].dep >= tau) return reversed[i].val;
  }
  return PackedTime::kInf;
}

uint32_t evaluate_scalar_binary(const std::vector<ScalarEntry>& reversed, TimeSec tau) {
  // departures decrease with the storage index
  auto it = std::lower_bound(reversed.begin(), reversed.end(), tau,
                             [](const ScalarEntry& e, TimeSec v) { return e.dep >= v; });
  if (it == reversed.begin()) return PackedTime::kInf;
  return std::prev(it)->val;
}

ParetoVec evaluate_pareto(const std::vector<ParetoEntry>& reversed, TimeSec tau, int leg_max) {
  for (size_t i = reversed.size(); i-- > 0;) {
    if (reversed[i].dep >= tau) return reversed[i].val;
  }
  return ParetoVec::all_inf(leg_max);
}

namespace {

// Front insertion with the bounded front-window rewrite: entries departing
// before the new pair are lifted out, the pair is inserted if it contributes,
// and the removed pairs that still contribute are put back.
void insert_scalar(std::vector<ScalarEntry>& rv, TimeSec dep, uint32_t val,
                   std::vector<ScalarEntry>& scratch, ScanStats& stats) {
  scratch.clear();
  while (!rv.empty() && rv.back().dep < dep) {
    scratch.push_back(rv.back());
    rv.pop_back();
  }
  stats.rewrite_window += scratch.size();

  uint32_t front = rv.empty() ? PackedTime::kInf : rv.back().val;
  uint32_t bound = front;
  if (val < front) {
    if (!rv.empty() && rv.back().dep == dep)
      rv.back().val = val;
    else
      rv.push_back({dep, val});
    bound = val;
  }
  for (auto it = scratch.rbegin(); it != scratch.rend(); ++it) {
    if (it->val < bound) {
      rv.push_back(*it);
      bound = it->val;
    }
  }
}

void insert_pareto(std::vector<ParetoEntry>& rv, TimeSec dep, const ParetoVec& val,
                   std::vector<ParetoEntry>& scratch, ScanStats& stats, int leg_max) {
  scratch.clear();
  while (!rv.empty() && rv.back().dep < dep) {
    scratch.push_back(rv.back());
    rv.pop_back();
  }
  stats.rewrite_window += scratch.size();

  ParetoVec front = rv.empty() ? ParetoVec::all_inf(leg_max) : rv.back().val;
  ParetoVec merged = vec_min(front, val);
  ParetoVec bound = front;
  if (!(merged == front)) {
    if (!rv.empty() && rv.back().dep == dep)
      rv.back().val = merged;
    else
      rv.push_back({dep, merged});
    bound = merged;
  }
  for (auto it = scratch.rbegin(); it != scratch.rend(); ++it) {
    ParetoVec m = vec_min(it->val, bound);
    if (!(m == bound)) {
      rv.push_back({it->dep, m});
      bound = m;
    }
  }
}

template <typename Fn>
void for_connections_decreasing(const Timetable& tt, const ProfileOptions& opts, Fn&& fn) {
  if (!opts.restrict_to.empty()) {
    for (auto it = opts.restrict_to.rbegin(); it != opts.restrict_to.rend(); ++it) fn(*it);
    return;
  }
  ConnId last = std::min<ConnId>(opts.window_last, static_cast<ConnId>(tt.connection_count()));
  for (ConnId ci = last; ci-- > opts.window_first;) fn(ci);
}

}  // namespace

ScalarProfile ea_profile(const Timetable& tt, StopId target, const ProfileOptions& opts) {
  if (target >= tt.stop_count()) throw std::out_of_range("invalid target stop");
  if (opts.source && *opts.source >= tt.stop_count()) throw std::out_of_range("invalid source stop");

  ScalarProfile prof(tt.stop_count(), tt.trip_count(), target);
  prof.rounding_bits = opts.rounding_bits;
  prof.leg_tiebreak = opts.leg_tiebreak;
  prof.walk_to_target = target_walk_list(tt, target);

  std::vector<TimeSec> walk_dense(tt.stop_count(), kInfTime);
  for (auto [s, d] : prof.walk_to_target) walk_dense[s] = d;

  const unsigned r = opts.rounding_bits;
  const unsigned init_legs = opts.leg_tiebreak ? 1 : 0;
  const uint32_t inc = PackedTime::leg_increment(r);
  const bool sdom = opts.source_domination && opts.source.has_value();
  std::vector<ScalarEntry> scratch;

  for_connections_decreasing(tt, opts, [&](ConnId ci) {
    const Connection& c = tt.conn(ci);
    if (opts.reachable_trips && !opts.reachable_trips->trip_set(c.trip)) return;
    ++prof.stats.scanned;

    uint32_t tau1 = PackedTime::kInf;
    if (walk_dense[c.arr_stop] < kInfTime) {
      TimeSec a = c.arr_time + walk_dense[c.arr_stop];
      if (PackedTime::fits(a, init_legs)) tau1 = PackedTime::pack(a, init_legs, r);
    }
    uint32_t tau2 = prof.trip_val[c.trip];
    uint32_t tau3 = evaluate_scalar(prof.stops.reversed(c.arr_stop), c.arr_time);
    if (opts.leg_tiebreak && tau3 != PackedTime::kInf) tau3 = saturating_add(tau3, inc);

    uint32_t tau_c = std::min(tau1, std::min(tau2, tau3));
    if (tau_c == PackedTime::kInf) return;
    if (opts.max_arrival && PackedTime::arrival(tau_c, r) > *opts.max_arrival) return;

    if (sdom &&
        evaluate_scalar(prof.stops.reversed(*opts.source), c.dep_time) <= tau_c)
      return;  // every journey through c from the source is dominated

    bool incorporate = true;
    if (opts.limited_walking &&
        evaluate_scalar(prof.stops.reversed(c.dep_stop), c.dep_time) <= tau_c)
      incorporate = false;
    if (incorporate) {
      for (const auto& f : tt.footpaths_to(c.dep_stop))
        insert_scalar(prof.stops.reversed(f.dep_stop), c.dep_time - f.dur, tau_c, scratch,
                      prof.stats);
    }
    prof.trip_val[c.trip] = tau_c;
  });
  return prof;
}

ParetoProfile pareto_profile(const Timetable& tt, StopId target, int leg_max,
                             const ProfileOptions& opts) {
  if (target >= tt.stop_count()) throw std::out_of_range("invalid target stop");
  if (leg_max < 1 || leg_max > kLegMaxLimit)
    throw std::out_of_range("leg_max must be in [1, 31]");

  ParetoProfile prof(tt.stop_count(), tt.trip_count(), target, leg_max);
  prof.modified_shift = opts.modified_shift;
  prof.walk_to_target = target_walk_list(tt, target);

  std::vector<TimeSec> walk_dense(tt.stop_count(), kInfTime);
  for (auto [s, d] : prof.walk_to_target) walk_dense[s] = d;

  const bool sdom = opts.source_domination && opts.source.has_value();
  std::vector<ParetoEntry> scratch;

  for_connections_decreasing(tt, opts, [&](ConnId ci) {
    const Connection& c = tt.conn(ci);
    if (opts.reachable_trips && !opts.reachable_trips->trip_set(c.trip)) return;
    ++prof.stats.scanned;

    ParetoVec tau1 = ParetoVec::all_inf(leg_max);
    if (walk_dense[c.arr_stop] < kInfTime) {
      TimeSec a = c.arr_time + walk_dense[c.arr_stop];
      if (a < PackedTime::kInf) tau1 = ParetoVec::broadcast(leg_max, static_cast<uint32_t>(a));
    }
    const ParetoVec& tau2 = prof.trip_val[c.trip];
    ParetoVec tau3 = vector_shift(
        evaluate_pareto(prof.stops.reversed(c.arr_stop), c.arr_time, leg_max),
        opts.modified_shift);

    ParetoVec tau_c = vec_min(tau1, vec_min(tau2, tau3));
    if (tau_c.is_inf()) return;
    if (opts.max_arrival && tau_c.a[leg_max] > *opts.max_arrival) return;

    if (sdom) {
      ParetoVec w = evaluate_pareto(prof.stops.reversed(*opts.source), c.dep_time, leg_max);
      if (vec_min(w, tau_c) == w) return;
    }

    bool incorporate = true;
    if (opts.limited_walking) {
      ParetoVec w = evaluate_pareto(prof.stops.reversed(c.dep_stop), c.dep_time, leg_max);
      if (vec_min(w, tau_c) == w) incorporate = false;
    }
    if (incorporate) {
      for (const auto& f : tt.footpaths_to(c.dep_stop))
        insert_pareto(prof.stops.reversed(f.dep_stop), c.dep_time - f.dur, tau_c, scratch,
                      prof.stats, leg_max);
    }
    prof.trip_val[c.trip] = tau_c;
  });
  return prof;
}

RangeResult range_query(const Timetable& tt, StopId source, TimeSec source_time, StopId target,
                        bool pareto, const ProfileOptions& opts) {
  if (source >= tt.stop_count() || target >= tt.stop_count())
    throw std::out_of_range("invalid stop id");

  RangeResult res;
  EaState pre(tt);
  pre.reset();
  for (const auto& f : tt.footpaths_from(source)) {
    TimeSec t = source_time + f.dur;
    if (t < pre.arrival(f.arr_stop)) pre.set_arrival(f.arr_stop, t);
  }

  // Forward scan: fixes eat(source, target), then keeps marking reachable
  // trips until the horizon closes.
  ConnId first = tt.first_connection_not_before(source_time);
  auto conns = tt.connections();
  TimeSec tau_t = kInfTime;
  ConnId ci = first;
  for (; ci < conns.size(); ++ci) {
    const Connection& c = conns[ci];
    if (tau_t == kInfTime && pre.arrival(target) <= c.dep_time) {
      res.earliest_arrival = pre.arrival(target);
      tau_t = source_time + 2 * (res.earliest_arrival - source_time);
    }
    if (c.dep_time > tau_t) break;
    ++res.prescan_count;
    if (pre.trip_set(c.trip) || pre.arrival(c.dep_stop) <= c.dep_time) {
      if (!pre.trip_set(c.trip)) pre.set_trip(c.trip, ci);
      if (c.arr_time < pre.arrival(c.arr_stop)) {
        for (const auto& f : tt.footpaths_from(c.arr_stop)) {
          TimeSec t = c.arr_time + f.dur;
          if (t < pre.arrival(f.arr_stop)) pre.set_arrival(f.arr_stop, t);
        }
      }
    }
  }
  if (tau_t == kInfTime) {
    // ran out of connections; the tentative value is final
    if (pre.arrival(target) >= kInfTime) return res;  // flagged empty
    res.earliest_arrival = pre.arrival(target);
    tau_t = source_time + 2 * (res.earliest_arrival - source_time);
    ci = static_cast<ConnId>(conns.size());
  }
  res.reachable = true;
  res.max_arrival = tau_t;

  ProfileOptions popts = opts;
  popts.source = source;
  popts.source_time = source_time;
  popts.window_first = first;
  auto it = std::upper_bound(conns.begin(), conns.end(), tau_t,
                             [](TimeSec v, const Connection& c) { return v < c.dep_time; });
  popts.window_last = static_cast<ConnId>(it - conns.begin());
  popts.max_arrival = tau_t;
  popts.reachable_trips = &pre;

  if (pareto)
    res.pareto = pareto_profile(tt, target, opts.leg_max, popts);
  else
    res.scalar = ea_profile(tt, target, popts);
  return res;
}

namespace {

// Shared walk over the profile, leg by leg. The Value policy hides scalar vs
// pareto arithmetic.
template <typename Prof, typename Policy>
Journey extract_walk(const Timetable& tt, const AuxIndexes& aux, const Prof& prof, StopId source,
                     TimeSec source_time, Policy pol) {
  Journey j;
  StopId at = source;
  TimeSec tau = source_time;

  auto val0 = pol.evaluate(at, tau);
  TimeSec walk0 = prof.walk(at);
  if (walk0 < kInfTime && pol.walk_not_worse(tau, walk0, val0)) {
    j.footpaths.push_back({at, prof.target, walk0});
    return j;
  }
  if (pol.is_inf(val0)) throw std::invalid_argument("target not reachable from this departure");

  auto promised = val0;
  while (true) {
    TimeSec dep = pol.pareto_fixed_departure(at, tau, promised);

    bool advanced = false;
    for (const auto& f : tt.footpaths_from(at)) {
      auto departures = aux.departures_at(f.arr_stop);
      TimeSec want = dep + f.dur;
      auto it = std::lower_bound(departures.begin(), departures.end(), want,
                                 [&](ConnId c, TimeSec v) { return tt.conn(c).dep_time < v; });
      for (; it != departures.end() && tt.conn(*it).dep_time == want; ++it) {
        ConnId enter = *it;
        if (pol.trip_pruned(tt.conn(enter).trip, promised)) continue;
        auto seq = tt.trip_connections(tt.conn(enter).trip);
        // latest valid exit first, so a trip is never used twice
        for (uint32_t p = static_cast<uint32_t>(seq.size()); p-- > tt.trip_position(enter);) {
          ConnId exit = seq[p];
          const Connection& e = tt.conn(exit);
          TimeSec w = prof.walk(e.arr_stop);
          if (w < kInfTime && pol.final_leg_matches(e.arr_time, w, promised)) {
            j.footpaths.push_back(f);
            j.legs.push_back({enter, exit});
            j.footpaths.push_back({e.arr_stop, prof.target, w});
            return j;
          }
          auto cont = pol.evaluate(e.arr_stop, e.arr_time);
          if (pol.continuation_matches(cont, promised)) {
            j.footpaths.push_back(f);
            j.legs.push_back({enter, exit});
            at = e.arr_stop;
            tau = e.arr_time;
            promised = pol.advance(cont, promised);
            advanced = true;
            break;
          }
        }
        if (advanced) break;
      }
      if (advanced) break;
    }
    if (!advanced) throw std::logic_error("profile promises a leg that cannot be extracted");
  }
}

struct ScalarPolicy {
  const ScalarProfile& prof;
  unsigned r;
  bool eps;
  uint32_t inc;

  uint32_t evaluate(StopId s, TimeSec tau) const {
    return evaluate_scalar(prof.stops.reversed(s), tau);
  }
  bool is_inf(uint32_t v) const { return v == PackedTime::kInf; }
  bool walk_not_worse(TimeSec tau, TimeSec walk, uint32_t v) const {
    if (v == PackedTime::kInf) return true;
    return tau + walk <= PackedTime::arrival(v, r);
  }
  TimeSec pareto_fixed_departure(StopId s, TimeSec tau, uint32_t promised) const {
    // scalar entries have pairwise distinct values; the evaluated pair is it
    const auto& rv = prof.stops.reversed(s);
    for (size_t i = rv.size(); i-- > 0;)
      if (rv[i].dep >= tau) return rv[i].dep;
    throw std::logic_error("promised value without a profile entry");
  }
  bool trip_pruned(TripId t, uint32_t promised) const { return prof.trip_val[t] > promised; }
  bool final_leg_matches(TimeSec arr, TimeSec walk, uint32_t promised) const {
    TimeSec a = arr + walk;
    if (!PackedTime::fits(a, eps ? 1 : 0)) return false;
    return PackedTime::pack(a, eps ? 1 : 0, r) == promised;
  }
  bool continuation_matches(uint32_t cont, uint32_t promised) const {
    if (cont == PackedTime::kInf) return false;
    return (eps ? saturating_add(cont, inc) : cont) == promised;
  }
  uint32_t advance(uint32_t cont, uint32_t) const { return cont; }
};

struct ParetoPolicy {
  const ParetoProfile& prof;
  int budget;  // remaining legs, mutated as the walk advances

  struct Value {
    ParetoVec vec;
  };

  ParetoVec evaluate(StopId s, TimeSec tau) const {
    return evaluate_pareto(prof.stops.reversed(s), tau, prof.leg_max);
  }
  bool is_inf(const ParetoVec& v) const { return v.a[budget] == PackedTime::kInf; }
  bool walk_not_worse(TimeSec tau, TimeSec walk, const ParetoVec& v) const {
    uint32_t best = v.a[budget];
    if (best == PackedTime::kInf) return true;
    return tau + walk <= static_cast<TimeSec>(best);
  }
  TimeSec pareto_fixed_departure(StopId s, TimeSec tau, uint32_t promised) const {
    // several pairs can share the promised component; the candidate set uses
    // the departure of the last one
    const auto& rv = prof.stops.reversed(s);
    size_t i = rv.size();
    while (i-- > 0)
      if (rv[i].dep >= tau) break;
    if (i == static_cast<size_t>(-1)) throw std::logic_error("promised value without an entry");
    size_t best = i;
    while (i-- > 0) {
      if (rv[i].val.a[budget] == promised)
        best = i;
      else
        break;
    }
    return rv[best].dep;
  }
  bool trip_pruned(TripId t, uint32_t promised) const {
    return prof.trip_val[t].a[budget] > promised;
  }
  bool final_leg_matches(TimeSec arr, TimeSec walk, uint32_t promised) const {
    return static_cast<uint32_t>(arr + walk) == promised;
  }
  bool continuation_matches(const ParetoVec& cont, uint32_t promised) {
    if (budget >= 2 && cont.a[budget - 1] == promised) {
      next_budget_ = budget - 1;
      return true;
    }
    if (prof.modified_shift && budget == prof.leg_max && cont.a[prof.leg_max] == promised) {
      next_budget_ = prof.leg_max;
      return true;
    }
    return false;
  }
  uint32_t advance(const ParetoVec&, uint32_t promised) {
    budget = next_budget_;
    return promised;
  }

 private:
  int next_budget_ = 0;
};

}  // namespace

Journey extract_profile_journey(const Timetable& tt, const AuxIndexes& aux,
                                const ScalarProfile& prof, StopId source, TimeSec source_time) {
  ScalarPolicy pol{prof, prof.rounding_bits, prof.leg_tiebreak,
                   PackedTime::leg_increment(prof.rounding_bits)};
  return extract_walk(tt, aux, prof, source, source_time, pol);
}

Journey extract_profile_journey(const Timetable& tt, const AuxIndexes& aux,
                                const ParetoProfile& prof, StopId source, TimeSec source_time,
                                int leg_limit) {
  if (leg_limit < 1 || leg_limit > prof.leg_max)
    throw std::out_of_range("leg limit outside the profile's range");
  ParetoPolicy pol{prof, leg_limit};
  return extract_walk(tt, aux, prof, source, source_time, pol);
}

}  // namespace connscan
