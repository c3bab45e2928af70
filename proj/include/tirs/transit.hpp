#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "tirs/netgraph.hpp"

namespace tirs {

struct Request;

struct TransitStop {
  std::string id;
  Point position;
  NodeId node = 0;  // road node the stop is snapped to
};

// One timetabled vehicle on a line. Times are seconds since midnight and are
// indexed by position along the line's stop sequence.
struct TransitRun {
  std::string id;
  int capacity = 0;
  std::vector<Seconds> arrival;
  std::vector<Seconds> departure;
};

struct TransitLine {
  std::string id;
  std::vector<std::size_t> stops;  // indices into TransitSchedule::stops, in travel order
  std::vector<TransitRun> runs;    // ordered by first departure
};

struct TransitSchedule {
  std::vector<TransitStop> stops;
  std::vector<TransitLine> lines;

  const TransitStop& stop_at(std::size_t line, std::size_t position) const {
    return stops[lines[line].stops[position]];
  }
  std::size_t run_count() const;
};

// (line, run, departure position, arrival position) plus the timetable times
// at those positions.
struct TransitLeg {
  std::size_t line = 0;
  std::size_t run = 0;
  std::size_t depart_position = 0;
  std::size_t arrive_position = 0;
  NodeId depart_node = 0;
  NodeId arrive_node = 0;
  Seconds board_time = 0.0;
  Seconds alight_time = 0.0;

  auto key() const { return std::tie(line, run, depart_position, arrive_position); }
  friend bool operator==(const TransitLeg& a, const TransitLeg& b) { return a.key() == b.key(); }
  friend auto operator<=>(const TransitLeg& a, const TransitLeg& b) { return a.key() <=> b.key(); }
};

TransitLeg make_leg(const TransitSchedule& s, std::size_t line, std::size_t run,
                    std::size_t depart_position, std::size_t arrive_position);

// Checks timetable monotonicity, positive capacities and that every stop node
// is in the graph. Throws DataError.
void validate_schedule(const TransitSchedule& s, const RoadGraph& g);

// GTFS subset: stops.txt, routes.txt, trips.txt, stop_times.txt. Stops snap to
// the nearest road node within snap_radius meters.
TransitSchedule load_schedule(const std::filesystem::path& dir, const RoadGraph& g,
                              Meters snap_radius = 500.0);
void write_schedule(const TransitSchedule& s, const std::filesystem::path& dir);

// Number of ordered (departure, arrival) stop pairs summed over every run.
std::uint64_t unpruned_leg_count(const TransitSchedule& s);

// Per-run, per-interval seat occupancy. Interval k spans line positions k..k+1.
class CapacityLedger {
 public:
  CapacityLedger() = default;
  explicit CapacityLedger(const TransitSchedule& s);

  int occupancy(std::size_t line, std::size_t run, std::size_t interval) const;
  int capacity(std::size_t line, std::size_t run) const;
  bool has_seat(const TransitLeg& leg) const;

  // Throws CapacityError when some interval of the leg is full.
  void reserve(const TransitLeg& leg);
  // Throws LedgerError when no matching reservation exists.
  void release(const TransitLeg& leg);

  std::int64_t total_occupancy() const;
  std::int64_t reservation_count() const;

  friend bool operator==(const CapacityLedger&, const CapacityLedger&) = default;

 private:
  std::vector<std::vector<std::vector<int>>> occupancy_;  // [line][run][interval]
  std::vector<std::vector<int>> capacity_;                 // [line][run]
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, int> reservations_;
};

// The three exact checks: the departure stop is reachable by car before
// boarding, the destination is reachable by car from the arrival stop by the
// deadline, and every interval of the leg has a free seat.
bool leg_passes_checks(const Request& r, const TransitLeg& leg, const Router& router, Seconds now,
                       const CapacityLedger& ledger);

// Candidate legs for a request after nearest-stop selection per line and the
// three exact checks (reachable departure, reachable deadline, free seat).
// The result is sorted by board time.
std::vector<TransitLeg> enumerate_legs(const Request& r, const TransitSchedule& s,
                                       const Router& router, Seconds now,
                                       const CapacityLedger& ledger);

}  // namespace tirs
