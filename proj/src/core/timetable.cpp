#include "core/timetable.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace connscan {

uint64_t fnv1a(const void* data, size_t n, uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

// Min-plus closure of the interstop footpath graph, per weak component.
// Also lowers a stop's change time when a round trip undercuts it, so the
// triangle inequality holds with the loop.
void synthesize_footpath_closure(std::vector<Stop>& stops, std::vector<Footpath>& fps) {
  size_t n = stops.size();
  std::vector<std::vector<std::pair<StopId, TimeSec>>> adj(n);
  for (const auto& f : fps) adj[f.dep_stop].push_back({f.arr_stop, f.dur});

  // Weak components over the interstop edges.
  std::vector<uint32_t> comp(n, kInvalidId);
  std::vector<std::vector<StopId>> members;
  std::vector<std::vector<StopId>> undirected(n);
  for (const auto& f : fps) {
    undirected[f.dep_stop].push_back(f.arr_stop);
    undirected[f.arr_stop].push_back(f.dep_stop);
  }
  for (StopId s = 0; s < n; ++s) {
    if (comp[s] != kInvalidId || undirected[s].empty()) continue;
    uint32_t id = static_cast<uint32_t>(members.size());
    members.push_back({});
    std::vector<StopId> stack{s};
    comp[s] = id;
    while (!stack.empty()) {
      StopId u = stack.back();
      stack.pop_back();
      members[id].push_back(u);
      for (StopId v : undirected[u]) {
        if (comp[v] == kInvalidId) {
          comp[v] = id;
          stack.push_back(v);
        }
      }
    }
  }

  std::vector<Footpath> closed;
  for (const auto& m : members) {
    size_t k = m.size();
    std::vector<TimeSec> d(k * k, kInfTime);
    std::map<StopId, size_t> idx;
    for (size_t i = 0; i < k; ++i) idx[m[i]] = i;
    for (size_t i = 0; i < k; ++i) d[i * k + i] = 0;
    for (size_t i = 0; i < k; ++i)
      for (auto [v, w] : adj[m[i]]) {
        size_t j = idx[v];
        d[i * k + j] = std::min(d[i * k + j], w);
      }
    for (size_t via = 0; via < k; ++via)
      for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
          d[i * k + j] = std::min(d[i * k + j], add_time(d[i * k + via], d[via * k + j]));
    for (size_t i = 0; i < k; ++i) {
      for (size_t j = 0; j < k; ++j) {
        if (i == j) continue;
        if (d[i * k + j] < kInfTime)
          closed.push_back({m[i], m[j], std::max<TimeSec>(d[i * k + j], 1)});
      }
      // round trip shorter than the change time breaks the triangle inequality
      TimeSec round = kInfTime;
      for (size_t j = 0; j < k; ++j) {
        if (i == j) continue;
        round = std::min(round, add_time(d[i * k + j], d[j * k + i]));
      }
      if (round < stops[m[i]].change_time) stops[m[i]].change_time = round;
    }
  }
  fps = std::move(closed);
}

struct Tok {
  std::string_view sv;
  int line;
  template <typename T>
  T num(const char* what) const {
    T v{};
    auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec != std::errc() || p != sv.data() + sv.size())
      throw ParseError(line, std::string("bad ") + what + " '" + std::string(sv) + "'");
    return v;
  }
};

}  // namespace

Timetable Timetable::build(std::vector<Stop> stops, std::vector<Connection> conns,
                           size_t trip_count, std::vector<Footpath> interstop_footpaths,
                           bool synthesize_closure) {
  Timetable tt;
  if (synthesize_closure) synthesize_footpath_closure(stops, interstop_footpaths);
  tt.stops_ = std::move(stops);

  // Stable sort keeps input order among equal departure times.
  std::stable_sort(conns.begin(), conns.end(),
                   [](const Connection& a, const Connection& b) { return a.dep_time < b.dep_time; });
  tt.conns_ = std::move(conns);

  tt.trips_.assign(trip_count, {});
  for (ConnId c = 0; c < tt.conns_.size(); ++c) tt.trips_[tt.conns_[c].trip].push_back(c);
  for (auto& t : tt.trips_)
    std::sort(t.begin(), t.end(), [&](ConnId a, ConnId b) {
      return tt.conns_[a].dep_time < tt.conns_[b].dep_time;
    });
  tt.trip_pos_.assign(tt.conns_.size(), 0);
  for (const auto& t : tt.trips_)
    for (uint32_t i = 0; i < t.size(); ++i) tt.trip_pos_[t[i]] = i;

  tt.interstop_fp_count_ = interstop_footpaths.size();

  // Loops are synthesized from change times; full adjacency = loops + interstop.
  std::vector<Footpath> all = std::move(interstop_footpaths);
  for (StopId s = 0; s < tt.stops_.size(); ++s) all.push_back({s, s, tt.stops_[s].change_time});

  auto fill_csr = [&](auto key, std::vector<Footpath>& out, std::vector<uint32_t>& begin) {
    std::sort(all.begin(), all.end(), [&](const Footpath& a, const Footpath& b) {
      if (key(a) != key(b)) return key(a) < key(b);
      if (a.dep_stop != b.dep_stop) return a.dep_stop < b.dep_stop;
      return a.arr_stop < b.arr_stop;
    });
    out = all;
    begin.assign(tt.stops_.size() + 1, 0);
    for (const auto& f : all) ++begin[key(f) + 1];
    for (size_t s = 1; s <= tt.stops_.size(); ++s) begin[s] += begin[s - 1];
  };
  fill_csr([](const Footpath& f) { return f.dep_stop; }, tt.fp_out_, tt.fp_out_begin_);
  fill_csr([](const Footpath& f) { return f.arr_stop; }, tt.fp_in_, tt.fp_in_begin_);
  return tt;
}

bool Timetable::transfer_reachable(StopId a, TimeSec ta, StopId b, TimeSec tb) const {
  for (const auto& f : footpaths_from(a))
    if (f.arr_stop == b && tb - ta >= f.dur) return true;
  return false;
}

ConnId Timetable::first_connection_not_before(TimeSec t) const {
  auto it = std::lower_bound(conns_.begin(), conns_.end(), t,
                             [](const Connection& c, TimeSec v) { return c.dep_time < v; });
  return static_cast<ConnId>(it - conns_.begin());
}

ValidationReport Timetable::validate() const {
  ValidationReport rep;
  auto bad = [&](std::string kind, std::string detail) {
    rep.push_back({std::move(kind), std::move(detail)});
  };

  for (StopId s = 0; s < stops_.size(); ++s)
    if (stops_[s].change_time < 0)
      bad("negative-change-time", "stop " + std::to_string(s));

  for (ConnId c = 0; c < conns_.size(); ++c) {
    const auto& cn = conns_[c];
    if (cn.dep_stop == cn.arr_stop)
      bad("connection-self-loop", "connection " + std::to_string(c));
    if (cn.dep_time >= cn.arr_time)
      bad("connection-time-order", "connection " + std::to_string(c) + " dep " +
                                       std::to_string(cn.dep_time) + " >= arr " +
                                       std::to_string(cn.arr_time));
    if (c + 1 < conns_.size() && conns_[c].dep_time > conns_[c + 1].dep_time)
      bad("connections-unsorted", "at " + std::to_string(c));
  }

  for (TripId t = 0; t < trips_.size(); ++t) {
    const auto& seq = trips_[t];
    for (size_t i = 0; i + 1 < seq.size(); ++i) {
      const auto& a = conns_[seq[i]];
      const auto& b = conns_[seq[i + 1]];
      if (a.arr_stop != b.dep_stop)
        bad("trip-stop-chain", "trip " + std::to_string(t) + " at leg " + std::to_string(i));
      if (a.arr_time >= b.dep_time)
        bad("trip-time-order", "trip " + std::to_string(t) + " at leg " + std::to_string(i));
    }
  }

  // Footpath structure. The CSR already contains loops; collect interstop edges.
  std::map<std::pair<StopId, StopId>, TimeSec> edge;
  for (StopId s = 0; s < stops_.size(); ++s) {
    bool loop_seen = false;
    std::set<StopId> targets;
    for (const auto& f : footpaths_from(s)) {
      if (f.dep_stop == f.arr_stop) {
        if (loop_seen) bad("duplicate-loop", "stop " + std::to_string(s));
        loop_seen = true;
        if (f.dur != stops_[s].change_time)
          bad("loop-change-mismatch", "stop " + std::to_string(s));
        continue;
      }
      if (f.dur <= 0)
        bad("footpath-nonpositive", std::to_string(f.dep_stop) + "->" + std::to_string(f.arr_stop));
      if (!targets.insert(f.arr_stop).second)
        bad("duplicate-footpath", std::to_string(f.dep_stop) + "->" + std::to_string(f.arr_stop));
      edge[{f.dep_stop, f.arr_stop}] = f.dur;
    }
    if (!loop_seen) bad("missing-loop", "stop " + std::to_string(s));
  }

  // Transitive closure + triangle inequality over two-edge paths (loops included
  // as endpoints): checking each path is O(sum deg^2), fine for small components.
  for (const auto& [ab, dab] : edge) {
    auto [a, b] = ab;
    for (const auto& f : footpaths_from(b)) {
      StopId c = f.arr_stop;
      TimeSec dbc = f.dur;
      if (c == a) {
        if (dab + dbc < stops_[a].change_time)
          bad("triangle-violation", std::to_string(a) + "->" + std::to_string(b) + "->" +
                                        std::to_string(a) + " undercuts loop");
        continue;
      }
      if (c == b) continue;
      auto it = edge.find({a, c});
      if (it == edge.end())
        bad("closure-violation",
            std::to_string(a) + "->" + std::to_string(b) + "->" + std::to_string(c) + " missing " +
                std::to_string(a) + "->" + std::to_string(c));
      else if (dab + dbc < it->second)
        bad("triangle-violation",
            std::to_string(a) + "->" + std::to_string(b) + "->" + std::to_string(c));
    }
  }
  return rep;
}

std::string Timetable::to_text() const {
  std::ostringstream os;
  for (StopId s = 0; s < stops_.size(); ++s) {
    os << "S " << s << ' ' << stops_[s].change_time;
    if (!stops_[s].name.empty()) os << ' ' << stops_[s].name;
    os << '\n';
  }
  for (TripId t = 0; t < trips_.size(); ++t) os << "T " << t << '\n';
  for (const auto& c : conns_)
    os << "C " << c.trip << ' ' << c.dep_stop << ' ' << c.arr_stop << ' ' << c.dep_time << ' '
       << c.arr_time << '\n';
  for (StopId s = 0; s < stops_.size(); ++s)
    for (const auto& f : footpaths_from(s))
      if (f.dep_stop != f.arr_stop) os << "F " << f.dep_stop << ' ' << f.arr_stop << ' ' << f.dur << '\n';
  return os.str();
}

uint64_t Timetable::content_hash() const {
  std::string t = to_text();
  return fnv1a(t.data(), t.size());
}

Timetable load_timetable_text(const std::string& text, bool synthesize_closure) {
  std::vector<std::pair<int64_t, Stop>> stops;       // declared id -> stop
  std::vector<std::pair<int64_t, int>> trip_decls;   // id, line
  std::vector<Connection> conns;
  std::vector<std::pair<Footpath, int>> fps;
  std::vector<int> conn_lines;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::vector<Tok> toks;
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) toks.push_back({std::string_view(line).substr(i, j - i), lineno});
      i = j;
    }
    if (toks.empty()) continue;
    auto need = [&](size_t n, const char* what) {
      if (toks.size() < n + 1) throw ParseError(lineno, std::string(what) + ": too few fields");
    };
    if (toks[0].sv == "S") {
      need(2, "S record");
      Stop st;
      st.change_time = toks[2].num<int64_t>("change_time");
      if (st.change_time < 0) throw ParseError(lineno, "change_time must be >= 0");
      if (toks.size() > 3) st.name = std::string(toks[3].sv);
      stops.push_back({toks[1].num<int64_t>("stop id"), std::move(st)});
    } else if (toks[0].sv == "T") {
      need(1, "T record");
      trip_decls.push_back({toks[1].num<int64_t>("trip id"), lineno});
    } else if (toks[0].sv == "C") {
      need(5, "C record");
      Connection c;
      c.trip = toks[1].num<uint32_t>("trip id");
      c.dep_stop = toks[2].num<uint32_t>("dep stop");
      c.arr_stop = toks[3].num<uint32_t>("arr stop");
      c.dep_time = toks[4].num<int64_t>("dep time");
      c.arr_time = toks[5].num<int64_t>("arr time");
      if (c.dep_stop == c.arr_stop)
        throw ParseError(lineno, "connection departs and arrives at the same stop");
      if (c.dep_time >= c.arr_time) throw ParseError(lineno, "connection dep_time >= arr_time");
      if (c.dep_time < 0) throw ParseError(lineno, "negative timestamp");
      conns.push_back(c);
      conn_lines.push_back(lineno);
    } else if (toks[0].sv == "F") {
      need(3, "F record");
      Footpath f;
      f.dep_stop = toks[1].num<uint32_t>("dep stop");
      f.arr_stop = toks[2].num<uint32_t>("arr stop");
      f.dur = toks[3].num<int64_t>("dur");
      fps.push_back({f, lineno});
    } else {
      throw ParseError(lineno, "unknown record '" + std::string(toks[0].sv) + "'");
    }
  }

  // Stop/trip ids must be dense.
  std::vector<Stop> stop_vec(stops.size());
  std::vector<bool> seen(stops.size(), false);
  for (auto& [id, st] : stops) {
    if (id < 0 || static_cast<size_t>(id) >= stops.size() || seen[id])
      throw ParseError(0, "stop ids must be dense 0..n-1, got " + std::to_string(id));
    seen[id] = true;
    stop_vec[id] = std::move(st);
  }
  std::vector<bool> trip_seen(trip_decls.size(), false);
  for (auto [id, ln] : trip_decls) {
    if (id < 0 || static_cast<size_t>(id) >= trip_decls.size() || trip_seen[id])
      throw ParseError(ln, "trip ids must be dense 0..n-1, got " + std::to_string(id));
    trip_seen[id] = true;
  }
  size_t n = stop_vec.size();
  for (size_t i = 0; i < conns.size(); ++i) {
    const auto& c = conns[i];
    if (c.dep_stop >= n || c.arr_stop >= n)
      throw ParseError(conn_lines[i], "connection references unknown stop");
    if (c.trip >= trip_decls.size())
      throw ParseError(conn_lines[i], "connection references undeclared trip");
  }

  std::vector<Footpath> interstop;
  for (auto& [f, ln] : fps) {
    if (f.dep_stop >= n || f.arr_stop >= n)
      throw ParseError(ln, "footpath references unknown stop");
    if (f.dep_stop == f.arr_stop) {
      // explicit loop lines are allowed when they restate the change time
      if (f.dur != stop_vec[f.dep_stop].change_time)
        throw ParseError(ln, "loop footpath duration must equal the stop change time");
      continue;
    }
    if (f.dur <= 0 && !synthesize_closure)
      throw ParseError(ln, "interstop footpath duration must be positive");
    interstop.push_back(f);
  }

  Timetable tt = Timetable::build(std::move(stop_vec), std::move(conns), trip_decls.size(),
                                  std::move(interstop), synthesize_closure);
  if (!synthesize_closure) {
    auto rep = tt.validate();
    for (const auto& v : rep) {
      if (v.kind == "closure-violation" || v.kind == "triangle-violation" ||
          v.kind == "duplicate-footpath" || v.kind == "trip-stop-chain" ||
          v.kind == "trip-time-order")
        throw ParseError(0, "constraint violation: " + v.kind + " (" + v.detail + ")");
    }
  }
  return tt;
}

Timetable load_timetable_file(const std::string& path, bool synthesize_closure) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open timetable file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return load_timetable_text(ss.str(), synthesize_closure);
}

AuxIndexes build_aux_indexes(const Timetable& tt) {
  AuxIndexes aux;
  aux.connections_by_trip.resize(tt.trip_count());
  for (TripId t = 0; t < tt.trip_count(); ++t) {
    auto seq = tt.trip_connections(t);
    aux.connections_by_trip[t].assign(seq.begin(), seq.end());
  }
  aux.connections_by_arrival.resize(tt.stop_count());
  aux.connections_by_departure.resize(tt.stop_count());
  for (ConnId c = 0; c < tt.connection_count(); ++c) {
    aux.connections_by_arrival[tt.conn(c).arr_stop].push_back(c);
    aux.connections_by_departure[tt.conn(c).dep_stop].push_back(c);
  }
  for (auto& v : aux.connections_by_arrival)
    std::sort(v.begin(), v.end(), [&](ConnId a, ConnId b) {
      if (tt.conn(a).arr_time != tt.conn(b).arr_time) return tt.conn(a).arr_time < tt.conn(b).arr_time;
      return a < b;
    });
  for (auto& v : aux.connections_by_departure)
    std::sort(v.begin(), v.end());  // connection ids are already departure-ordered
  return aux;
}

}  // namespace connscan
