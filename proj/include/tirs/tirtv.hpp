#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tirs/demand.hpp"
#include "tirs/pdp.hpp"
#include "tirs/segments.hpp"

namespace tirs {

// Sorted indices into the batch's segment list.
struct Trip {
  std::vector<std::size_t> segments;
  friend bool operator==(const Trip&, const Trip&) = default;
};

struct TirtvOptions {
  std::size_t max_trip_size = 4;
  // Only segments of one request may share a trip, which caps every vehicle
  // at one new request per batch.
  bool single_request_trips = true;
  PdpOptions pdp;
  std::size_t threads = 1;
};

// Rules that forbid two segments from sharing a vehicle: two first miles of
// a request, two last miles of a request, a first and last mile of a request
// on different legs, and a request's direct segment with any of its miles.
bool mutually_exclusive(const TravelSegment& a, const TravelSegment& b);

struct Shareability {
  std::size_t segment_count = 0;
  std::vector<std::vector<std::size_t>> neighbors;  // sorted segment-segment adjacency
  std::vector<std::vector<std::size_t>> vehicles;   // per segment: vehicles able to serve it alone
  std::vector<std::vector<PdpRoute>> vehicle_routes;  // parallel to `vehicles`

  bool adjacent(std::size_t a, std::size_t b) const;
  std::size_t edge_count() const;
};

// Empty segments get no edges. Two segments are adjacent when a phantom empty
// vehicle, placed at either pickup at the earlier window start, can serve
// both and no exclusivity rule applies.
Shareability build_shareability(std::span<const TravelSegment> segments,
                                std::span<const VehicleState> vehicles, const Router& router,
                                Seconds now, const TirtvOptions& opts = {});

// Every clique of the shareability graph up to max_trip_size, generated by
// size and then lexicographically.
std::vector<Trip> build_trips(const Shareability& share, std::size_t max_trip_size);

inline constexpr std::size_t kDummyVehicle = std::numeric_limits<std::size_t>::max();

struct TripVehicleEdge {
  std::size_t trip = 0;
  std::size_t vehicle = kDummyVehicle;  // index into TirtvGraph::vehicles
  double cost = 0.0;
  PdpRoute route;
  bool dummy() const { return vehicle == kDummyVehicle; }
};

struct RequestTripEdge {
  std::size_t request = 0;  // index into TirtvGraph::requests
  std::size_t trip = 0;
};

struct TirtvGraph {
  std::vector<Request> requests;
  std::vector<TravelSegment> segments;
  std::vector<Trip> trips;
  std::vector<VehicleState> vehicles;
  Seconds now = 0.0;
  std::vector<RequestTripEdge> request_trip;   // E1, ordered by (request, trip)
  std::vector<TripVehicleEdge> trip_vehicle;   // E2, ordered by (trip, vehicle), dummy last

  std::size_t request_index(RequestId id) const;
};

// Vehicle columns are computed independently (optionally on worker threads)
// in increasing trip size; a (vehicle, trip) pair is routed only if the
// vehicle serves every one-smaller sub-trip. Trips made only of empty
// segments attach to the dummy vehicle at zero cost.
TirtvGraph build_tirtv(std::span<const Request> requests,
                       std::span<const TravelSegment> segments, std::span<const Trip> trips,
                       std::span<const VehicleState> vehicles, const Router& router, Seconds now,
                       const TirtvOptions& opts = {}, const Shareability* share = nullptr);

// The ride-sharing-only view: trips made of direct segments and their edges.
TirtvGraph restrict_to_direct(const TirtvGraph& g);

std::string dump_json(const TirtvGraph& g);

}  // namespace tirs
