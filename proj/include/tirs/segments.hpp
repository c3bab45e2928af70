#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tirs/demand.hpp"
#include "tirs/netgraph.hpp"
#include "tirs/transit.hpp"

namespace tirs {

enum class SegmentKind { FirstMile, LastMile, Direct };

const char* to_string(SegmentKind kind);

struct WalkParams {
  double speed = 1.4;      // m/s
  Meters max_walk = 400.0;
};

// The part of a request's journey a ride-sharing vehicle would cover. An
// empty segment is walked instead and never occupies a vehicle.
struct TravelSegment {
  SegmentKind kind = SegmentKind::Direct;
  RequestId request = 0;
  std::optional<TransitLeg> leg;  // set iff kind != Direct
  NodeId pickup = 0;
  NodeId dropoff = 0;
  Seconds pickup_earliest = 0.0;
  Seconds pickup_latest = 0.0;
  Seconds dropoff_deadline = 0.0;
  bool empty = false;
  Seconds walk_time = 0.0;  // meaningful when empty
};

// Same request and same transit leg (or both Direct).
bool same_option(const TravelSegment& a, const TravelSegment& b);

// One Direct segment followed by a FirstMile/LastMile pair per surviving leg.
// A leg is dropped whole when either of its miles is neither walkable nor
// drivable in time. `now` is the decision time; pickups never precede it.
std::vector<TravelSegment> decompose(const Request& r, std::span<const TransitLeg> legs,
                                     const Router& router, const WalkParams& walk,
                                     Seconds now);
inline std::vector<TravelSegment> decompose(const Request& r, std::span<const TransitLeg> legs,
                                            const Router& router, const WalkParams& walk) {
  return decompose(r, legs, router, walk, r.request_time);
}

// True iff some leg can be reached and left on foot within the request's
// windows (closed comparisons).
bool transit_only_feasible(const Request& r, std::span<const TransitLeg> legs,
                           const Router& router, const WalkParams& walk, Seconds now);
inline bool transit_only_feasible(const Request& r, std::span<const TransitLeg> legs,
                                  const Router& router, const WalkParams& walk) {
  return transit_only_feasible(r, legs, router, walk, r.request_time);
}

}  // namespace tirs
