#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tirs/csv.hpp"
#include "tirs/simcore.hpp"

namespace tirs {

namespace {

nlohmann::ordered_json leg_json(const TransitLeg& leg) {
  return {{"line", leg.line},
          {"run", leg.run},
          {"from", leg.depart_position},
          {"to", leg.arrive_position},
          {"board", leg.board_time},
          {"alight", leg.alight_time}};
}

double ratio(std::size_t a, std::size_t b) {
  return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

}  // namespace

void write_event_jsonl(std::ostream& os, const SimEvent& e) {
  nlohmann::ordered_json j;
  j["type"] = to_string(e.kind);
  j["time"] = e.time;
  if (e.request >= 0) j["request"] = e.request;
  if (e.vehicle >= 0) j["vehicle"] = e.vehicle;
  if (e.node >= 0) j["node"] = e.node;
  switch (e.kind) {
    case EventKind::RequestArrival:
      j["destination"] = e.to;
      j["direct_distance"] = e.distance;
      j["deadline"] = e.deadline;
      break;
    case EventKind::Move:
      j["to"] = e.to;
      j["distance"] = e.distance;
      break;
    case EventKind::Pickup:
    case EventKind::Dropoff:
      j["segment"] = to_string(e.segment);
      break;
    case EventKind::Assigned:
    case EventKind::TransitOnly:
      j["option"] = e.kind == EventKind::TransitOnly ? "transit_only" : to_string(e.option);
      if (e.leg) {
        j["leg"] = leg_json(*e.leg);
        j["first_mile_empty"] = e.first_mile_empty;
        j["last_mile_empty"] = e.last_mile_empty;
        if (e.miles_share_vehicle) j["miles_share_vehicle"] = true;
      }
      break;
    case EventKind::Completed:
      j["option"] = to_string(e.option);
      j["deadline"] = e.deadline;
      break;
    case EventKind::Unserved:
      j["direct_distance"] = e.distance;
      break;
    case EventKind::Board:
    case EventKind::Alight:
    case EventKind::BusViolation:
      if (e.leg) j["leg"] = leg_json(*e.leg);
      break;
    case EventKind::Batch:
      j["batch"] = e.batch;
      j["requests"] = e.count;
      j["objective"] = e.objective;
      if (e.twin_objective) j["rideshare_only_objective"] = *e.twin_objective;
      j["optimal"] = e.optimal;
      j["wall_seconds"] = e.wall_seconds;
      break;
    default:
      break;
  }
  os << j.dump() << '\n';
}

void write_event_log(std::ostream& os, std::span<const SimEvent> log) {
  for (const auto& e : log) write_event_jsonl(os, e);
}

MetricsReport compute_metrics(std::span<const SimEvent> log) {
  if (log.empty() || log.back().kind != EventKind::End)
    throw std::runtime_error("event log is incomplete: no end event");
  MetricsReport m;
  std::set<RequestId> arrived, terminal, assigned, completed;
  std::size_t fm_only = 0, lm_only = 0, both = 0;
  Meters fleet = 0.0, unserved_distance = 0.0;
  std::vector<double> walls;
  for (const auto& e : log) {
    switch (e.kind) {
      case EventKind::RequestArrival:
        if (!arrived.insert(e.request).second)
          throw std::runtime_error("request " + std::to_string(e.request) + " arrived twice");
        break;
      case EventKind::TransitOnly:
        ++m.transit_only;
        terminal.insert(e.request);
        break;
      case EventKind::Unserved:
        ++m.unserved;
        unserved_distance += e.distance;
        terminal.insert(e.request);
        break;
      case EventKind::Assigned:
        assigned.insert(e.request);
        terminal.insert(e.request);
        if (e.option == ServiceStatus::Direct) {
          ++m.direct;
        } else {
          ++m.multimodal;
          if (e.first_mile_empty)
            ++lm_only;
          else if (e.last_mile_empty)
            ++fm_only;
          else
            ++both;
        }
        break;
      case EventKind::Completed:
        completed.insert(e.request);
        if (e.time > e.deadline + 1e-6) ++m.deadline_violations;
        break;
      case EventKind::Move:
        fleet += e.distance;
        break;
      case EventKind::BusViolation:
        ++m.bus_violations;
        break;
      case EventKind::Batch:
        walls.push_back(e.wall_seconds);
        break;
      default:
        break;
    }
  }
  for (RequestId r : arrived)
    if (!terminal.contains(r))
      throw std::runtime_error("event log is incomplete: request " + std::to_string(r) +
                               " has no outcome");
  for (RequestId r : assigned)
    if (!completed.contains(r))
      throw std::runtime_error("event log is incomplete: request " + std::to_string(r) +
                               " was never delivered");

  m.requests = arrived.size();
  const std::size_t served_rs = m.direct + m.multimodal;
  m.service_rate_undefined = m.requests == 0;
  m.service_rate = m.requests == 0 ? 1.0 : ratio(served_rs + m.transit_only, m.requests);
  m.rideshare_service_rate =
      m.requests == m.transit_only ? 1.0 : ratio(served_rs, m.requests - m.transit_only);
  m.direct_share = ratio(m.direct, served_rs);
  m.multimodal_share = ratio(m.multimodal, served_rs);
  m.first_mile_only = ratio(fm_only, m.multimodal);
  m.last_mile_only = ratio(lm_only, m.multimodal);
  m.both_miles = ratio(both, m.multimodal);
  m.fleet_vmt_km = fleet / 1000.0;
  m.total_vmt_km = (fleet + unserved_distance) / 1000.0;
  m.batches = walls.size();
  if (!walls.empty()) {
    double sum = 0.0;
    for (double w : walls) sum += w;
    m.mean_batch_seconds = sum / static_cast<double>(walls.size());
    m.max_batch_seconds = *std::max_element(walls.begin(), walls.end());
  }
  return m;
}

void write_metrics_json(std::ostream& os, const MetricsReport& m) {
  nlohmann::ordered_json j;
  j["requests"] = m.requests;
  j["served"] = {{"transit_only", m.transit_only}, {"direct", m.direct}, {"multimodal", m.multimodal}};
  j["unserved"] = m.unserved;
  j["service_rate"] = m.service_rate;
  j["service_rate_excluding_transit_only"] = m.rideshare_service_rate;
  j["service_rate_undefined"] = m.service_rate_undefined;
  j["composition"] = {{"direct", m.direct_share}, {"multimodal", m.multimodal_share}};
  j["multimodal_split"] = {{"first_mile_only", m.first_mile_only},
                           {"last_mile_only", m.last_mile_only},
                           {"both_miles", m.both_miles}};
  j["fleet_vmt_km"] = m.fleet_vmt_km;
  j["total_vmt_km"] = m.total_vmt_km;
  j["bus_capacity_violations"] = m.bus_violations;
  j["deadline_violations"] = m.deadline_violations;
  j["batches"] = m.batches;
  j["batch_seconds"] = {{"mean", m.mean_batch_seconds}, {"max", m.max_batch_seconds}};
  os << j.dump(2) << '\n';
}

std::string metrics_csv_header() {
  return "fleet_size,capacity,mode,requests,transit_only,direct,multimodal,unserved,"
         "service_rate,service_rate_excluding_transit_only,direct_share,multimodal_share,"
         "first_mile_only,last_mile_only,both_miles,fleet_vmt_km,total_vmt_km,"
         "bus_capacity_violations,deadline_violations,batches";
}

std::string metrics_csv_row(const SimConfig& cfg, const MetricsReport& m) {
  using csv::format_double;
  std::ostringstream os;
  os << cfg.fleet_size << ',' << cfg.vehicle_capacity << ',' << to_string(cfg.mode) << ','
     << m.requests << ',' << m.transit_only << ',' << m.direct << ',' << m.multimodal << ','
     << m.unserved << ',' << format_double(m.service_rate) << ','
     << format_double(m.rideshare_service_rate) << ',' << format_double(m.direct_share) << ','
     << format_double(m.multimodal_share) << ',' << format_double(m.first_mile_only) << ','
     << format_double(m.last_mile_only) << ',' << format_double(m.both_miles) << ','
     << format_double(m.fleet_vmt_km) << ',' << format_double(m.total_vmt_km) << ','
     << m.bus_violations << ',' << m.deadline_violations << ',' << m.batches;
  return os.str();
}

std::size_t transit_only_count(const TransitSchedule& schedule, const Router& router,
                               std::span<const Request> requests, const WalkParams& walk) {
  const CapacityLedger empty(schedule);
  std::size_t n = 0;
  for (const auto& r : requests)
    n += transit_only_feasible(r, enumerate_legs(r, schedule, router, r.request_time, empty),
                               router, walk)
             ? 1
             : 0;
  return n;
}

std::vector<std::pair<Meters, double>> transit_reach(const TransitSchedule& schedule,
                                                     const Router& router,
                                                     std::span<const Request> requests,
                                                     std::span<const Meters> walk_distances,
                                                     double walk_speed) {
  if (requests.empty()) throw std::invalid_argument("transit reach needs at least one request");
  const CapacityLedger empty(schedule);
  std::vector<std::vector<TransitLeg>> legs;
  legs.reserve(requests.size());
  for (const auto& r : requests)
    legs.push_back(enumerate_legs(r, schedule, router, r.request_time, empty));
  std::vector<std::pair<Meters, double>> out;
  for (Meters d : walk_distances) {
    const WalkParams walk{walk_speed, d};
    std::size_t hits = 0;
    for (std::size_t i = 0; i < requests.size(); ++i)
      hits += transit_only_feasible(requests[i], legs[i], router, walk) ? 1 : 0;
    out.emplace_back(d, ratio(hits, requests.size()));
  }
  return out;
}

}  // namespace tirs
