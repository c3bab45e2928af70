#include "tirs/transit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <unordered_map>

#include "tirs/csv.hpp"
#include "tirs/demand.hpp"
#include "tirs/errors.hpp"

namespace tirs {

std::size_t TransitSchedule::run_count() const {
  std::size_t n = 0;
  for (const auto& l : lines) n += l.runs.size();
  return n;
}

TransitLeg make_leg(const TransitSchedule& s, std::size_t line, std::size_t run,
                    std::size_t depart_position, std::size_t arrive_position) {
  const TransitRun& r = s.lines[line].runs[run];
  TransitLeg leg;
  leg.line = line;
  leg.run = run;
  leg.depart_position = depart_position;
  leg.arrive_position = arrive_position;
  leg.depart_node = s.stop_at(line, depart_position).node;
  leg.arrive_node = s.stop_at(line, arrive_position).node;
  leg.board_time = r.departure[depart_position];
  leg.alight_time = r.arrival[arrive_position];
  return leg;
}

void validate_schedule(const TransitSchedule& s, const RoadGraph& g) {
  for (const auto& stop : s.stops)
    if (!g.contains(stop.node))
      throw DataError("stop '" + stop.id + "' is bound to unknown node " +
                      std::to_string(stop.node));
  for (const auto& line : s.lines) {
    if (line.stops.size() < 2) throw DataError("line '" + line.id + "' has fewer than 2 stops");
    for (const auto& run : line.runs) {
      if (run.capacity <= 0) throw DataError("run '" + run.id + "' has non-positive capacity");
      if (run.arrival.size() != line.stops.size() || run.departure.size() != line.stops.size())
        throw DataError("run '" + run.id + "' does not cover every stop of line '" + line.id +
                        "'");
      for (std::size_t k = 0; k < line.stops.size(); ++k) {
        if (run.departure[k] < run.arrival[k])
          throw DataError("run '" + run.id + "' departs before it arrives at position " +
                          std::to_string(k));
        if (k > 0 && !(run.arrival[k] > run.departure[k - 1]))
          throw DataError("run '" + run.id + "' has non-increasing stop times at position " +
                          std::to_string(k));
      }
    }
  }
}

TransitSchedule load_schedule(const std::filesystem::path& dir, const RoadGraph& g,
                              Meters snap_radius) {
  if (!std::filesystem::is_directory(dir))
    throw DataError("transit directory '" + dir.string() + "' does not exist");
  for (const char* name : {"stops.txt", "routes.txt", "trips.txt", "stop_times.txt"})
    if (!std::filesystem::exists(dir / name))
      throw DataError("missing GTFS file '" + (dir / name).string() + "'");

  TransitSchedule s;
  std::unordered_map<std::string, std::size_t> stop_index;
  {
    const auto t = csv::Table::read(dir / "stops.txt");
    const auto c_id = t.column("stop_id"), c_x = t.column("x"), c_y = t.column("y");
    for (const auto& rec : t.records()) {
      TransitStop stop;
      stop.id = t.field(rec, c_id);
      stop.position = {t.number(rec, c_x), t.number(rec, c_y)};
      auto node = g.nearest_node(stop.position);
      if (!node) throw DataError("road graph is empty; cannot snap stops");
      const Point p = g.position(*node);
      const double gap = std::hypot(p.x - stop.position.x, p.y - stop.position.y);
      if (gap > snap_radius)
        throw DataError((dir / "stops.txt").string() + ":" + std::to_string(rec.line) +
                        ": stop '" + stop.id + "' is " + csv::format_double(gap) +
                        " m from the nearest road node (snap radius " +
                        csv::format_double(snap_radius) + " m)");
      stop.node = *node;
      if (!stop_index.emplace(stop.id, s.stops.size()).second)
        throw DataError("duplicate stop_id '" + stop.id + "'");
      s.stops.push_back(std::move(stop));
    }
  }

  std::unordered_map<std::string, std::size_t> line_index;
  {
    const auto t = csv::Table::read(dir / "routes.txt");
    const auto c_id = t.column("route_id");
    for (const auto& rec : t.records()) {
      const auto& id = t.field(rec, c_id);
      if (!line_index.emplace(id, s.lines.size()).second)
        throw DataError("duplicate route_id '" + id + "'");
      s.lines.push_back({id, {}, {}});
    }
  }

  struct RunDraft {
    std::string id;
    std::size_t line;
    int capacity;
    std::vector<std::tuple<std::int64_t, std::size_t, Seconds, Seconds, std::size_t>> calls;
  };
  std::vector<RunDraft> drafts;
  std::unordered_map<std::string, std::size_t> run_index;
  {
    const auto t = csv::Table::read(dir / "trips.txt");
    const auto c_id = t.column("trip_id"), c_route = t.column("route_id"),
               c_cap = t.column("capacity");
    for (const auto& rec : t.records()) {
      const auto& route = t.field(rec, c_route);
      auto it = line_index.find(route);
      if (it == line_index.end())
        throw DataError((dir / "trips.txt").string() + ":" + std::to_string(rec.line) +
                        ": unknown route_id '" + route + "'");
      const auto cap = t.integer(rec, c_cap);
      if (cap <= 0)
        throw DataError((dir / "trips.txt").string() + ":" + std::to_string(rec.line) +
                        ": capacity must be positive");
      const auto& id = t.field(rec, c_id);
      if (!run_index.emplace(id, drafts.size()).second)
        throw DataError("duplicate trip_id '" + id + "'");
      drafts.push_back({id, it->second, static_cast<int>(cap), {}});
    }
  }
  {
    const auto t = csv::Table::read(dir / "stop_times.txt");
    const auto c_trip = t.column("trip_id"), c_seq = t.column("stop_sequence"),
               c_stop = t.column("stop_id"), c_arr = t.column("arrival_s"),
               c_dep = t.column("departure_s");
    for (const auto& rec : t.records()) {
      const std::string where = (dir / "stop_times.txt").string() + ":" + std::to_string(rec.line);
      auto run = run_index.find(t.field(rec, c_trip));
      if (run == run_index.end())
        throw DataError(where + ": unknown trip_id '" + t.field(rec, c_trip) + "'");
      auto stop = stop_index.find(t.field(rec, c_stop));
      if (stop == stop_index.end())
        throw DataError(where + ": unknown stop_id '" + t.field(rec, c_stop) + "'");
      drafts[run->second].calls.emplace_back(t.integer(rec, c_seq), stop->second,
                                             t.number(rec, c_arr), t.number(rec, c_dep),
                                             rec.line);
    }
  }

  for (auto& d : drafts) {
    std::sort(d.calls.begin(), d.calls.end());
    TransitLine& line = s.lines[d.line];
    std::vector<std::size_t> pattern;
    TransitRun run;
    run.id = d.id;
    run.capacity = d.capacity;
    for (std::size_t k = 0; k < d.calls.size(); ++k) {
      const auto& [seq, stop, arr, dep, lineno] = d.calls[k];
      if (k > 0 && std::get<0>(d.calls[k - 1]) == seq)
        throw DataError("trip '" + d.id + "' repeats stop_sequence " + std::to_string(seq));
      if (dep < arr || (k > 0 && !(arr > run.departure.back())))
        throw DataError((dir / "stop_times.txt").string() + ":" + std::to_string(lineno) +
                        ": stop times of trip '" + d.id + "' are not strictly increasing");
      pattern.push_back(stop);
      run.arrival.push_back(arr);
      run.departure.push_back(dep);
    }
    if (pattern.size() < 2) throw DataError("trip '" + d.id + "' visits fewer than 2 stops");
    if (line.stops.empty())
      line.stops = pattern;
    else if (line.stops != pattern)
      throw DataError("trip '" + d.id + "' does not follow the stop pattern of route '" +
                      line.id + "'");
    line.runs.push_back(std::move(run));
  }
  for (auto& line : s.lines)
    std::stable_sort(line.runs.begin(), line.runs.end(),
                     [](const TransitRun& a, const TransitRun& b) {
                       return a.departure.front() < b.departure.front();
                     });
  std::erase_if(s.lines, [](const TransitLine& l) { return l.runs.empty(); });
  validate_schedule(s, g);
  return s;
}

void write_schedule(const TransitSchedule& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw DataError("cannot write '" + (dir / name).string() + "'");
    return out;
  };
  {
    auto out = open("stops.txt");
    out << "stop_id,x,y\n";
    for (const auto& st : s.stops)
      out << st.id << ',' << csv::format_double(st.position.x) << ','
          << csv::format_double(st.position.y) << '\n';
  }
  {
    auto out = open("routes.txt");
    out << "route_id\n";
    for (const auto& l : s.lines) out << l.id << '\n';
  }
  {
    auto trips = open("trips.txt");
    auto times = open("stop_times.txt");
    trips << "trip_id,route_id,capacity\n";
    times << "trip_id,stop_sequence,stop_id,arrival_s,departure_s\n";
    for (const auto& l : s.lines)
      for (const auto& r : l.runs) {
        trips << r.id << ',' << l.id << ',' << r.capacity << '\n';
        for (std::size_t k = 0; k < l.stops.size(); ++k)
          times << r.id << ',' << k + 1 << ',' << s.stops[l.stops[k]].id << ','
                << csv::format_double(r.arrival[k]) << ',' << csv::format_double(r.departure[k])
                << '\n';
      }
  }
}

std::uint64_t unpruned_leg_count(const TransitSchedule& s) {
  std::uint64_t n = 0;
  for (const auto& l : s.lines) {
    const std::uint64_t k = l.stops.size();
    n += static_cast<std::uint64_t>(l.runs.size()) * k * (k - 1);
  }
  return n;
}

CapacityLedger::CapacityLedger(const TransitSchedule& s) {
  occupancy_.resize(s.lines.size());
  capacity_.resize(s.lines.size());
  for (std::size_t l = 0; l < s.lines.size(); ++l) {
    const auto& line = s.lines[l];
    occupancy_[l].assign(line.runs.size(), std::vector<int>(line.stops.size() - 1, 0));
    for (const auto& r : line.runs) capacity_[l].push_back(r.capacity);
  }
}

int CapacityLedger::occupancy(std::size_t line, std::size_t run, std::size_t interval) const {
  return occupancy_.at(line).at(run).at(interval);
}

int CapacityLedger::capacity(std::size_t line, std::size_t run) const {
  return capacity_.at(line).at(run);
}

bool CapacityLedger::has_seat(const TransitLeg& leg) const {
  const auto& occ = occupancy_.at(leg.line).at(leg.run);
  const int cap = capacity_[leg.line][leg.run];
  for (std::size_t k = leg.depart_position; k < leg.arrive_position; ++k)
    if (occ.at(k) >= cap) return false;
  return true;
}

void CapacityLedger::reserve(const TransitLeg& leg) {
  if (leg.arrive_position <= leg.depart_position)
    throw LedgerError("leg must depart before it arrives");
  if (!has_seat(leg))
    throw CapacityError("run " + std::to_string(leg.run) + " of line " +
                        std::to_string(leg.line) + " has no free seat between positions " +
                        std::to_string(leg.depart_position) + " and " +
                        std::to_string(leg.arrive_position));
  auto& occ = occupancy_[leg.line][leg.run];
  for (std::size_t k = leg.depart_position; k < leg.arrive_position; ++k) ++occ[k];
  ++reservations_[leg.key()];
}

void CapacityLedger::release(const TransitLeg& leg) {
  auto it = reservations_.find(leg.key());
  if (it == reservations_.end())
    throw LedgerError("release without a matching reservation");
  auto& occ = occupancy_[leg.line][leg.run];
  for (std::size_t k = leg.depart_position; k < leg.arrive_position; ++k) --occ[k];
  if (--it->second == 0) reservations_.erase(it);
}

std::int64_t CapacityLedger::total_occupancy() const {
  std::int64_t n = 0;
  for (const auto& line : occupancy_)
    for (const auto& run : line)
      for (int v : run) n += v;
  return n;
}

std::int64_t CapacityLedger::reservation_count() const {
  std::int64_t n = 0;
  for (const auto& [key, count] : reservations_) n += count;
  return n;
}

bool leg_passes_checks(const Request& r, const TransitLeg& leg, const Router& router, Seconds now,
                       const CapacityLedger& ledger) {
  const Seconds ready = std::max(now, r.request_time);
  const auto to_depart = router.cost(r.origin, leg.depart_node);
  const auto from_arrive = router.cost(leg.arrive_node, r.destination);
  if (!to_depart || !from_arrive) return false;
  return ready + to_depart->time <= leg.board_time &&
         leg.alight_time + from_arrive->time <= r.deadline && ledger.has_seat(leg);
}

std::vector<TransitLeg> enumerate_legs(const Request& r, const TransitSchedule& s,
                                       const Router& router, Seconds now,
                                       const CapacityLedger& ledger) {
  const Seconds ready = std::max(now, r.request_time);
  std::vector<TransitLeg> out;
  for (std::size_t l = 0; l < s.lines.size(); ++l) {
    const auto& line = s.lines[l];
    std::optional<std::size_t> depart, arrive;
    Seconds to_depart = std::numeric_limits<double>::infinity();
    Seconds from_arrive = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < line.stops.size(); ++k) {
      const NodeId node = s.stops[line.stops[k]].node;
      if (auto c = router.cost(r.origin, node); c && c->time < to_depart) {
        to_depart = c->time;
        depart = k;
      }
      if (auto c = router.cost(node, r.destination); c && c->time < from_arrive) {
        from_arrive = c->time;
        arrive = k;
      }
    }
    if (!depart || !arrive || *depart >= *arrive) continue;
    for (std::size_t i = 0; i < line.runs.size(); ++i) {
      const TransitLeg leg = make_leg(s, l, i, *depart, *arrive);
      if (ready + to_depart > leg.board_time) continue;
      if (leg.alight_time + from_arrive > r.deadline) continue;
      if (!ledger.has_seat(leg)) continue;
      out.push_back(leg);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const TransitLeg& a, const TransitLeg& b) {
    return a.board_time < b.board_time;
  });
  return out;
}

}  // namespace tirs
