#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "tirs/scenario.hpp"
#include "tirs/tirtv.hpp"

namespace fixtures {

// Five-by-five grid (100 m blocks, 10 s per block) with a horizontal bus line
// on row 2 and a vertical one on column 2, three runs each.
struct ToyCity {
  tirs::RoadGraph g = tirs::make_grid({5, 5, 100.0, 10.0});
  tirs::TransitSchedule s;
  ToyCity() {
    for (tirs::NodeId n : {10, 11, 12, 13, 14, 2, 7, 17, 22})
      s.stops.push_back({"s" + std::to_string(n), g.position(n), n});
    s.lines.push_back(tirs::make_line("h", {0, 1, 2, 3, 4}, {10, 10, 10, 10}, 5, 100, 500, 200, 2));
    s.lines.push_back(tirs::make_line("v", {5, 6, 2, 7, 8}, {10, 10, 10, 10}, 5, 150, 550, 200, 2));
  }
};

struct PdpInstance {
  tirs::VehicleState vehicle;
  std::vector<tirs::TravelSegment> trip;
  tirs::Seconds now = 0.0;
  std::size_t events() const {
    return vehicle.onboard.size() + 2 * (vehicle.pending.size() + trip.size());
  }
};

inline tirs::TravelSegment random_segment(std::mt19937_64& rng, const tirs::Router& router,
                                          tirs::RequestId id, tirs::Seconds now) {
  const auto n = static_cast<int>(router.graph().node_count());
  std::uniform_int_distribution<int> node(0, n - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  tirs::TravelSegment s;
  s.request = id;
  s.kind = tirs::SegmentKind::Direct;
  s.pickup = router.graph().id_at(static_cast<std::size_t>(node(rng)));
  do {
    s.dropoff = router.graph().id_at(static_cast<std::size_t>(node(rng)));
  } while (s.dropoff == s.pickup);
  const double direct = router.cost(s.pickup, s.dropoff)->time;
  s.pickup_earliest = now + std::floor(u(rng) * 60.0);
  s.pickup_latest = s.pickup_earliest + std::floor(30.0 + u(rng) * 120.0);
  s.dropoff_deadline = s.pickup_latest + direct + std::floor(u(rng) * 120.0);
  return s;
}

// Random vehicle with committed work plus a trip, at most `max_events` events.
inline PdpInstance random_pdp_instance(std::mt19937_64& rng, const tirs::Router& router,
                                       std::size_t max_events = 8) {
  const auto n = static_cast<int>(router.graph().node_count());
  std::uniform_int_distribution<int> node(0, n - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PdpInstance in;
  in.now = std::floor(u(rng) * 100.0);
  auto& v = in.vehicle;
  v.capacity = 1 + static_cast<int>(rng() % 4);
  v.location = router.graph().id_at(static_cast<std::size_t>(node(rng)));
  v.available_time = in.now + (rng() % 3 == 0 ? std::floor(u(rng) * 10.0) : 0.0);
  tirs::RequestId next = 100;
  const std::size_t onboard = std::min<std::size_t>(rng() % 3, static_cast<std::size_t>(v.capacity));
  for (std::size_t k = 0; k < onboard; ++k) {
    tirs::OnboardPassenger p;
    p.request = next++;
    p.dropoff = router.graph().id_at(static_cast<std::size_t>(node(rng)));
    p.deadline = in.now + router.cost(v.location, p.dropoff)->time + std::floor(u(rng) * 200.0);
    v.onboard.push_back(p);
  }
  if (rng() % 3 == 0 && in.events() + 2 <= max_events)
    v.pending.push_back(random_segment(rng, router, next++, in.now));
  const std::size_t trip = 1 + rng() % 2;
  for (std::size_t k = 0; k < trip && in.events() + 2 <= max_events; ++k)
    in.trip.push_back(random_segment(rng, router, next++, in.now));
  return in;
}

// A batch of the toy-city pipeline: requests, candidate legs, segments,
// shareability, trips and the TI-RTV graph.
struct BatchFixture {
  std::vector<tirs::Request> requests;
  std::vector<tirs::VehicleState> vehicles;
  std::vector<tirs::TravelSegment> segments;
  tirs::Shareability share;
  std::vector<tirs::Trip> trips;
  tirs::TirtvGraph graph;
  tirs::Seconds now = 0.0;
};

inline BatchFixture random_batch(std::mt19937_64& rng, const ToyCity& city,
                                 const tirs::Router& router, std::size_t max_requests,
                                 std::size_t max_vehicles, tirs::TirtvOptions opts = {},
                                 const tirs::WalkParams& walk = {1.4, 150.0}) {
  std::uniform_int_distribution<int> node(0, 24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BatchFixture f;
  f.now = 80.0 + std::floor(u(rng) * 300.0);
  const tirs::CapacityLedger ledger(city.s);
  const std::size_t R = 1 + rng() % max_requests;
  for (std::size_t i = 0; i < R; ++i) {
    int o = node(rng), d = node(rng);
    while (d == o) d = node(rng);
    const tirs::QosParams qos{0.2, 60.0 + std::floor(u(rng) * 240.0)};
    f.requests.push_back(tirs::make_request(static_cast<tirs::RequestId>(i), o, d,
                                            f.now - std::floor(u(rng) * 20.0), router, qos));
    const auto legs = tirs::enumerate_legs(f.requests.back(), city.s, router, f.now, ledger);
    const auto segs = tirs::decompose(f.requests.back(), legs, router, walk, f.now);
    f.segments.insert(f.segments.end(), segs.begin(), segs.end());
  }
  const std::size_t V = 1 + rng() % max_vehicles;
  for (std::size_t k = 0; k < V; ++k) {
    tirs::VehicleState v;
    v.id = static_cast<tirs::VehicleId>(k);
    v.capacity = 1 + static_cast<int>(rng() % 4);
    v.location = node(rng);
    v.available_time = f.now;
    f.vehicles.push_back(v);
  }
  f.share = tirs::build_shareability(f.segments, f.vehicles, router, f.now, opts);
  f.trips = tirs::build_trips(f.share, opts.max_trip_size);
  f.graph = tirs::build_tirtv(f.requests, f.segments, f.trips, f.vehicles, router, f.now, opts);
  return f;
}

}  // namespace fixtures
