#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tirs/netgraph.hpp"
#include "tirs/segments.hpp"

namespace tirs {

using VehicleId = std::int64_t;

struct OnboardPassenger {
  RequestId request = 0;
  SegmentKind kind = SegmentKind::Direct;
  NodeId dropoff = 0;
  Seconds deadline = 0.0;
};

// Planning snapshot of a ride-sharing vehicle. The vehicle is at `location`
// from `available_time` on (later than the clock only while finishing an edge).
struct VehicleState {
  VehicleId id = 0;
  int capacity = 1;
  NodeId location = 0;
  Seconds available_time = 0.0;
  std::vector<OnboardPassenger> onboard;
  std::vector<TravelSegment> pending;  // committed but not yet picked up
};

enum class EventType { Pickup, Dropoff };

struct RouteEvent {
  EventType type = EventType::Pickup;
  RequestId request = 0;
  SegmentKind kind = SegmentKind::Direct;
  NodeId node = 0;
  Seconds earliest = 0.0;  // pickups only
  Seconds latest = 0.0;    // latest service time
  Seconds time = 0.0;      // planned service time
};

enum class CostMetric { Distance, Time };

struct PdpOptions {
  CostMetric metric = CostMetric::Distance;
  std::size_t max_events = 12;  // routes with more events are reported infeasible
};

struct PdpRoute {
  bool feasible = false;
  std::vector<RouteEvent> events;
  Meters distance = 0.0;      // total route distance from the vehicle location
  Seconds drive_time = 0.0;   // total driving time, waits excluded
  Meters added_distance = 0.0;
  double added_cost = 0.0;    // in the configured metric
};

// Exact pickup-and-delivery routing: every precedence-respecting order of the
// vehicle's committed events plus the trip's pickup/dropoff events is
// considered. Ties keep the lexicographically first event order, events being
// numbered onboard dropoffs, then committed pickups/dropoffs, then the trip's.
// The added cost is measured against the best route for the committed events
// alone (`base`, computed when not supplied).
PdpRoute pdp_route(const VehicleState& v, std::span<const TravelSegment> trip,
                   const Router& router, Seconds now, const PdpOptions& opts = {},
                   const PdpRoute* base = nullptr);

// Best route for the committed events only.
PdpRoute base_route(const VehicleState& v, const Router& router, Seconds now,
                    const PdpOptions& opts = {});

}  // namespace tirs
