#include "tirs/tirtv.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "tirs/errors.hpp"
#include "tirs/parallel.hpp"

namespace tirs {

bool mutually_exclusive(const TravelSegment& a, const TravelSegment& b) {
  if (a.request != b.request) return false;
  if (a.kind == b.kind) return true;  // two first miles, two last miles (or two directs)
  if (a.kind == SegmentKind::Direct || b.kind == SegmentKind::Direct) return true;
  return a.leg != b.leg;  // first + last mile on different legs
}

bool Shareability::adjacent(std::size_t a, std::size_t b) const {
  const auto& n = neighbors.at(a);
  return std::binary_search(n.begin(), n.end(), b);
}

std::size_t Shareability::edge_count() const {
  std::size_t n = 0;
  for (const auto& v : neighbors) n += v.size();
  return n / 2;
}

Shareability build_shareability(std::span<const TravelSegment> segments,
                                std::span<const VehicleState> vehicles, const Router& router,
                                Seconds now, const TirtvOptions& opts) {
  Shareability out;
  const std::size_t n = segments.size();
  out.segment_count = n;
  out.neighbors.resize(n);
  out.vehicles.resize(n);
  out.vehicle_routes.resize(n);

  int phantom_capacity = 1;
  for (const auto& v : vehicles) phantom_capacity = std::max(phantom_capacity, v.capacity);

  // Segment-vehicle edges, one vehicle column per task.
  std::vector<std::vector<std::pair<std::size_t, PdpRoute>>> columns(vehicles.size());
  parallel_for(vehicles.size(), opts.threads, [&](std::size_t vi) {
    const VehicleState& v = vehicles[vi];
    const PdpRoute base = base_route(v, router, now, opts.pdp);
    if (!base.feasible) return;
    for (std::size_t s = 0; s < n; ++s) {
      if (segments[s].empty) continue;
      PdpRoute r = pdp_route(v, std::span(&segments[s], 1), router, now, opts.pdp, &base);
      if (r.feasible) columns[vi].emplace_back(s, std::move(r));
    }
  });
  for (std::size_t vi = 0; vi < vehicles.size(); ++vi)
    for (auto& [s, route] : columns[vi]) {
      out.vehicles[s].push_back(vi);
      out.vehicle_routes[s].push_back(std::move(route));
    }

  auto phantom_can_serve = [&](const TravelSegment& a, const TravelSegment& b) {
    const TravelSegment pair[2] = {a, b};
    VehicleState phantom;
    phantom.capacity = phantom_capacity;
    phantom.available_time = std::max(now, std::min(a.pickup_earliest, b.pickup_earliest));
    for (NodeId start : {a.pickup, b.pickup}) {
      phantom.location = start;
      if (pdp_route(phantom, pair, router, now, opts.pdp).feasible) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (segments[i].empty) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = segments[i];
      const auto& b = segments[j];
      if (b.empty || mutually_exclusive(a, b)) continue;
      if (opts.single_request_trips && a.request != b.request) continue;
      if (!phantom_can_serve(a, b)) continue;
      out.neighbors[i].push_back(j);
      out.neighbors[j].push_back(i);
    }
  }
  for (auto& nb : out.neighbors) std::sort(nb.begin(), nb.end());
  return out;
}

std::vector<Trip> build_trips(const Shareability& share, std::size_t max_trip_size) {
  std::vector<Trip> trips;
  if (max_trip_size == 0) return trips;
  for (std::size_t s = 0; s < share.segment_count; ++s) trips.push_back({{s}});
  std::size_t level_begin = 0;
  for (std::size_t size = 2; size <= max_trip_size; ++size) {
    const std::size_t level_end = trips.size();
    for (std::size_t t = level_begin; t < level_end; ++t) {
      // Extend by a larger-indexed segment adjacent to every member.
      const std::vector<std::size_t> base = trips[t].segments;
      for (std::size_t cand : share.neighbors[base.back()]) {
        if (cand <= base.back()) continue;
        bool clique = true;
        for (std::size_t m : base)
          if (!share.adjacent(m, cand)) {
            clique = false;
            break;
          }
        if (!clique) continue;
        Trip next{base};
        next.segments.push_back(cand);
        trips.push_back(std::move(next));
      }
    }
    level_begin = level_end;
    if (level_begin == trips.size()) break;
  }
  return trips;
}

std::size_t TirtvGraph::request_index(RequestId id) const {
  for (std::size_t i = 0; i < requests.size(); ++i)
    if (requests[i].id == id) return i;
  throw StructuralError("unknown request id " + std::to_string(id));
}

TirtvGraph build_tirtv(std::span<const Request> requests,
                       std::span<const TravelSegment> segments, std::span<const Trip> trips,
                       std::span<const VehicleState> vehicles, const Router& router, Seconds now,
                       const TirtvOptions& opts, const Shareability* share) {
  TirtvGraph g;
  g.requests.assign(requests.begin(), requests.end());
  g.segments.assign(segments.begin(), segments.end());
  g.trips.assign(trips.begin(), trips.end());
  g.vehicles.assign(vehicles.begin(), vehicles.end());
  g.now = now;

  std::unordered_map<RequestId, std::size_t> req_index;
  for (std::size_t i = 0; i < requests.size(); ++i)
    if (!req_index.emplace(requests[i].id, i).second)
      throw StructuralError("duplicate request id " + std::to_string(requests[i].id));
  for (const auto& s : segments)
    if (!req_index.contains(s.request))
      throw StructuralError("segment references unknown request " + std::to_string(s.request));

  std::map<std::vector<std::size_t>, std::size_t> trip_index;
  std::vector<char> all_empty(trips.size(), 0);
  for (std::size_t t = 0; t < trips.size(); ++t) {
    const auto& segs = trips[t].segments;
    if (segs.empty()) throw StructuralError("trip " + std::to_string(t) + " is empty");
    if (!std::is_sorted(segs.begin(), segs.end()) ||
        std::adjacent_find(segs.begin(), segs.end()) != segs.end())
      throw StructuralError("trip " + std::to_string(t) + " segments are not sorted and unique");
    std::size_t empties = 0;
    for (std::size_t s : segs) {
      if (s >= segments.size())
        throw StructuralError("trip " + std::to_string(t) + " references unknown segment " +
                              std::to_string(s));
      empties += segments[s].empty ? 1 : 0;
    }
    if (empties != 0 && empties != segs.size())
      throw StructuralError("trip " + std::to_string(t) + " mixes empty and non-empty segments");
    all_empty[t] = empties == segs.size();
    if (!trip_index.emplace(segs, t).second)
      throw StructuralError("duplicate trip " + std::to_string(t));
  }

  // E1
  for (std::size_t t = 0; t < trips.size(); ++t) {
    std::vector<std::size_t> members;
    for (std::size_t s : trips[t].segments) members.push_back(req_index.at(segments[s].request));
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (std::size_t r : members) g.request_trip.push_back({r, t});
  }
  std::sort(g.request_trip.begin(), g.request_trip.end(),
            [](const RequestTripEdge& a, const RequestTripEdge& b) {
              return std::tie(a.request, a.trip) < std::tie(b.request, b.trip);
            });

  // Order of evaluation: by trip size so every sub-trip is decided first.
  std::vector<std::size_t> by_size(trips.size());
  for (std::size_t t = 0; t < trips.size(); ++t) by_size[t] = t;
  std::stable_sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
    return trips[a].segments.size() < trips[b].segments.size();
  });

  std::vector<std::vector<TripVehicleEdge>> columns(vehicles.size());
  parallel_for(vehicles.size(), opts.threads, [&](std::size_t vi) {
    const VehicleState& v = vehicles[vi];
    const PdpRoute base = base_route(v, router, now, opts.pdp);
    if (!base.feasible) return;
    std::vector<char> feasible(trips.size(), 0);
    std::vector<TravelSegment> members;
    for (std::size_t t : by_size) {
      if (all_empty[t]) continue;
      const auto& segs = trips[t].segments;
      if (segs.size() > 1) {
        bool subsets_ok = true;
        std::vector<std::size_t> sub(segs.size() - 1);
        for (std::size_t skip = 0; skip < segs.size() && subsets_ok; ++skip) {
          for (std::size_t k = 0, w = 0; k < segs.size(); ++k)
            if (k != skip) sub[w++] = segs[k];
          auto it = trip_index.find(sub);
          subsets_ok = it != trip_index.end() && feasible[it->second];
        }
        if (!subsets_ok) continue;
      }
      PdpRoute route;
      bool reused = false;
      if (share && segs.size() == 1) {
        const auto& vs = share->vehicles.at(segs[0]);
        auto it = std::lower_bound(vs.begin(), vs.end(), vi);
        if (it == vs.end() || *it != vi) continue;
        route = share->vehicle_routes[segs[0]][static_cast<std::size_t>(it - vs.begin())];
        reused = true;
      }
      if (!reused) {
        members.clear();
        for (std::size_t s : segs) members.push_back(segments[s]);
        route = pdp_route(v, members, router, now, opts.pdp, &base);
      }
      if (!route.feasible) continue;
      feasible[t] = 1;
      columns[vi].push_back({t, vi, route.added_cost, std::move(route)});
    }
  });

  for (auto& col : columns)
    for (auto& e : col) g.trip_vehicle.push_back(std::move(e));
  for (std::size_t t = 0; t < trips.size(); ++t)
    if (all_empty[t]) g.trip_vehicle.push_back({t, kDummyVehicle, 0.0, {}});
  std::stable_sort(g.trip_vehicle.begin(), g.trip_vehicle.end(),
                   [](const TripVehicleEdge& a, const TripVehicleEdge& b) {
                     return std::tie(a.trip, a.vehicle) < std::tie(b.trip, b.vehicle);
                   });
  return g;
}

TirtvGraph restrict_to_direct(const TirtvGraph& g) {
  TirtvGraph out;
  out.requests = g.requests;
  out.vehicles = g.vehicles;
  out.now = g.now;
  std::vector<std::size_t> seg_map(g.segments.size(), kDummyVehicle);
  for (std::size_t s = 0; s < g.segments.size(); ++s)
    if (g.segments[s].kind == SegmentKind::Direct) {
      seg_map[s] = out.segments.size();
      out.segments.push_back(g.segments[s]);
    }
  std::vector<std::size_t> trip_map(g.trips.size(), kDummyVehicle);
  for (std::size_t t = 0; t < g.trips.size(); ++t) {
    Trip mapped;
    bool keep = true;
    for (std::size_t s : g.trips[t].segments) {
      if (seg_map[s] == kDummyVehicle) {
        keep = false;
        break;
      }
      mapped.segments.push_back(seg_map[s]);
    }
    if (!keep) continue;
    trip_map[t] = out.trips.size();
    out.trips.push_back(std::move(mapped));
  }
  for (const auto& e : g.request_trip)
    if (trip_map[e.trip] != kDummyVehicle) out.request_trip.push_back({e.request, trip_map[e.trip]});
  for (const auto& e : g.trip_vehicle)
    if (trip_map[e.trip] != kDummyVehicle) {
      TripVehicleEdge copy = e;
      copy.trip = trip_map[e.trip];
      out.trip_vehicle.push_back(std::move(copy));
    }
  return out;
}

std::string dump_json(const TirtvGraph& g) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["requests"] = ordered_json::array();
  for (const auto& r : g.requests)
    j["requests"].push_back({{"id", r.id},
                             {"origin", r.origin},
                             {"destination", r.destination},
                             {"request_time", r.request_time},
                             {"deadline", r.deadline}});
  j["segments"] = ordered_json::array();
  for (const auto& s : g.segments) {
    ordered_json seg = {{"kind", to_string(s.kind)},
                        {"request", s.request},
                        {"pickup", s.pickup},
                        {"dropoff", s.dropoff},
                        {"pickup_earliest", s.pickup_earliest},
                        {"dropoff_deadline", s.dropoff_deadline},
                        {"empty", s.empty}};
    if (s.leg)
      seg["leg"] = {{"line", s.leg->line},
                    {"run", s.leg->run},
                    {"depart", s.leg->depart_position},
                    {"arrive", s.leg->arrive_position}};
    j["segments"].push_back(std::move(seg));
  }
  j["trips"] = ordered_json::array();
  for (const auto& t : g.trips) j["trips"].push_back(t.segments);
  j["vehicles"] = ordered_json::array();
  for (const auto& v : g.vehicles)
    j["vehicles"].push_back({{"id", v.id},
                             {"capacity", v.capacity},
                             {"location", v.location},
                             {"available_time", v.available_time},
                             {"onboard", v.onboard.size()},
                             {"pending", v.pending.size()}});
  j["request_trip"] = ordered_json::array();
  for (const auto& e : g.request_trip) j["request_trip"].push_back({e.request, e.trip});
  j["trip_vehicle"] = ordered_json::array();
  for (const auto& e : g.trip_vehicle)
    j["trip_vehicle"].push_back(
        {{"trip", e.trip},
         {"vehicle", e.dummy() ? ordered_json("dummy") : ordered_json(e.vehicle)},
         {"cost", e.cost}});
  return j.dump(2);
}

}  // namespace tirs
