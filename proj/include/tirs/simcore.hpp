#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tirs/assign.hpp"
#include "tirs/demand.hpp"
#include "tirs/netgraph.hpp"
#include "tirs/pdp.hpp"
#include "tirs/segments.hpp"
#include "tirs/tirtv.hpp"
#include "tirs/transit.hpp"

namespace tirs {

enum class Mode { Integrated, RideshareOnly, MultiModalOnly };

const char* to_string(Mode m);
Mode parse_mode(const std::string& s);  // throws std::invalid_argument

struct SimConfig {
  Seconds batch_window = 30.0;
  std::size_t batch_cap = 100;
  std::size_t fleet_size = 10;
  int vehicle_capacity = 4;
  Mode mode = Mode::Integrated;
  QosParams qos;
  WalkParams walk;
  std::uint64_t seed = 1;
  double penalty_factor = 10.0;
  std::optional<double> fixed_penalty;  // replaces the factor rule when set
  CostMetric metric = CostMetric::Distance;
  std::size_t max_trip_size = 4;
  bool single_request_trips = true;
  std::size_t max_route_events = 12;
  double solver_time_limit = 60.0;
  std::size_t threads = 1;
  bool check_dominance = false;  // also solve the ride-sharing-only twin of every batch

  void validate() const;  // throws std::invalid_argument
};

enum class EventKind {
  VehicleStart,
  RequestArrival,
  TransitOnly,
  Assigned,
  Rejected,
  Unserved,
  Move,
  Pickup,
  Dropoff,
  Board,
  Alight,
  Completed,
  BusViolation,
  Batch,
  End,
};

const char* to_string(EventKind k);

struct SimEvent {
  EventKind kind = EventKind::End;
  Seconds time = 0.0;
  RequestId request = -1;
  VehicleId vehicle = -1;
  NodeId node = -1;
  NodeId to = -1;                    // Move
  SegmentKind segment = SegmentKind::Direct;
  ServiceStatus option = ServiceStatus::Rejected;  // Assigned, Completed
  std::optional<TransitLeg> leg{};
  bool first_mile_empty = false;
  bool last_mile_empty = false;
  bool miles_share_vehicle = false;  // Assigned: both miles in one vehicle trip
  Meters distance = 0.0;             // Move: edge length; Unserved: direct distance
  Seconds deadline = 0.0;            // Completed
  std::size_t batch = 0;
  std::size_t count = 0;             // Batch: requests considered
  double objective = 0.0;            // Batch
  std::optional<double> twin_objective{};  // Batch, ride-sharing-only twin
  double wall_seconds = 0.0;         // Batch
  bool optimal = true;               // Batch
};

void write_event_jsonl(std::ostream& os, const SimEvent& e);
void write_event_log(std::ostream& os, std::span<const SimEvent> log);

struct BatchRecord {
  std::size_t index = 0;
  Seconds time = 0.0;
  std::size_t requests = 0;
  std::size_t vehicles = 0;
  std::size_t segments = 0;
  std::size_t trips = 0;
  std::size_t trip_vehicle_edges = 0;
  double objective = 0.0;
  std::optional<double> twin_objective;
  bool optimal = true;
  std::size_t nodes = 0;
  double wall_seconds = 0.0;
  std::size_t violations = 0;  // bus-capacity violations booked in this batch
};

struct VehicleSnapshot {
  VehicleId id = 0;
  Point position;
  NodeId location = 0;
  Seconds available_time = 0.0;
  std::size_t onboard = 0;
  std::size_t pending = 0;
  std::size_t planned_events = 0;
};

// Batch simulator. Owns all mutable state; graph construction inside a
// batch may fan out over `threads` workers.
class Simulation {
 public:
  Simulation(const SimConfig& cfg, const RoadGraph& g, const TransitSchedule& schedule,
             std::vector<Request> demand);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Moves every vehicle and passenger forward to `until` (>= clock).
  void advance(Seconds until);
  // Advances to `now`, then assigns the given new requests plus the backlog.
  BatchRecord run_batch(Seconds now, std::span<const Request> arrivals);
  // Runs every batch and drains all committed work.
  void run();

  Seconds clock() const;
  const std::vector<SimEvent>& log() const;
  const std::vector<BatchRecord>& batches() const;
  const CapacityLedger& ledger() const;
  std::vector<VehicleSnapshot> vehicles() const;
  std::size_t backlog_size() const;
  bool idle() const;  // no committed work left
  const Router& router() const;

  // Places vehicle i at `node` (before any batch).
  void place_vehicle(std::size_t i, NodeId node);

 private:
  struct Impl;
  Impl* impl_;
};

struct MetricsReport {
  std::size_t requests = 0;
  std::size_t transit_only = 0;
  std::size_t direct = 0;
  std::size_t multimodal = 0;
  std::size_t unserved = 0;
  bool service_rate_undefined = false;
  double service_rate = 1.0;            // transit-only counted as served
  double rideshare_service_rate = 1.0;  // transit-only requests left out
  double direct_share = 0.0;            // of ride-sharing served
  double multimodal_share = 0.0;
  double first_mile_only = 0.0;         // of multi-modal
  double last_mile_only = 0.0;
  double both_miles = 0.0;
  double fleet_vmt_km = 0.0;
  double total_vmt_km = 0.0;
  std::size_t bus_violations = 0;
  std::size_t deadline_violations = 0;
  std::size_t batches = 0;
  double mean_batch_seconds = 0.0;
  double max_batch_seconds = 0.0;
};

// Throws std::runtime_error when the log is incomplete (no End event, or a
// request without a final outcome).
MetricsReport compute_metrics(std::span<const SimEvent> log);

struct SimResult {
  MetricsReport metrics;
  std::vector<SimEvent> log;
  std::vector<BatchRecord> batches;
};

// Requests with a walk-only transit journey at their request time.
std::size_t transit_only_count(const TransitSchedule& schedule, const Router& router,
                               std::span<const Request> requests, const WalkParams& walk);

// Fleet size for a ratio given per 1000 requests, rounded half away from zero
// and at least one vehicle.
std::size_t fleet_for_ratio(double per_thousand, std::size_t requests);

SimResult run(const SimConfig& cfg, const RoadGraph& g, const TransitSchedule& schedule,
              std::vector<Request> demand);

void write_metrics_json(std::ostream& os, const MetricsReport& m);
// Deterministic columns only (no wall times).
std::string metrics_csv_header();
std::string metrics_csv_row(const SimConfig& cfg, const MetricsReport& m);

// Fraction of requests with a walk-only transit journey, per walking limit.
std::vector<std::pair<Meters, double>> transit_reach(const TransitSchedule& schedule,
                                                     const Router& router,
                                                     std::span<const Request> requests,
                                                     std::span<const Meters> walk_distances,
                                                     double walk_speed = 1.4);

}  // namespace tirs
