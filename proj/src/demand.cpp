#include "tirs/demand.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <string>

#include "tirs/csv.hpp"
#include "tirs/errors.hpp"

namespace tirs {

Seconds max_travel_time(Seconds sptt, double alpha, Seconds beta) {
  return (1.0 + alpha) * sptt + beta;
}

Request make_request(RequestId id, NodeId origin, NodeId destination, Seconds request_time,
                     const Router& router, const QosParams& qos) {
  if (origin == destination)
    throw DataError("request " + std::to_string(id) + " has identical origin and destination");
  if (!router.graph().contains(origin) || !router.graph().contains(destination))
    throw DataError("request " + std::to_string(id) + " references an unknown node");
  auto direct = router.cost(origin, destination);
  if (!direct)
    throw DataError("request " + std::to_string(id) + ": destination unreachable from origin");
  Request r;
  r.id = id;
  r.origin = origin;
  r.destination = destination;
  r.request_time = request_time;
  r.sptt = direct->time;
  r.direct_distance = direct->distance;
  r.deadline = request_time + max_travel_time(r.sptt, qos.alpha, qos.beta);
  return r;
}

void validate(const DemandConfig& cfg) {
  if (!(cfg.morning.end > cfg.morning.start) || !(cfg.evening.end > cfg.evening.start))
    throw DataError("demand windows must be non-empty");
  if (cfg.min_trip_distance < 0.0) throw DataError("min_trip_distance must be >= 0");
  if (cfg.qos.alpha < 0.0 || cfg.qos.beta < 0.0) throw DataError("alpha and beta must be >= 0");
}

std::vector<Request> generate_demand(const DemandConfig& cfg, const Router& router) {
  validate(cfg);
  if (cfg.count == 0) return {};
  const RoadGraph& g = router.graph();
  if (g.node_count() < 2) throw GenerationError("graph needs at least two nodes");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.node_count() - 1);
  const std::size_t morning_count = (cfg.count + 1) / 2;

  struct Draft {
    NodeId origin, destination;
    Seconds time;
  };
  std::vector<Draft> drafts;
  drafts.reserve(cfg.count);
  for (std::size_t k = 0; k < cfg.count; ++k) {
    std::size_t attempt = 0;
    while (true) {
      if (attempt++ == cfg.max_draws_per_request)
        throw GenerationError("no origin/destination pair at least " +
                              csv::format_double(cfg.min_trip_distance) + " m apart after " +
                              std::to_string(cfg.max_draws_per_request) + " draws");
      const NodeId o = g.id_at(pick(rng));
      const NodeId d = g.id_at(pick(rng));
      if (o == d) continue;
      auto c = router.cost(o, d);
      if (!c || c->distance < cfg.min_trip_distance) continue;
      drafts.push_back({o, d, 0.0});
      break;
    }
    const TimeWindow& w = k < morning_count ? cfg.morning : cfg.evening;
    // Whole seconds keep request times exact in every text round trip.
    std::uniform_int_distribution<std::int64_t> when(static_cast<std::int64_t>(w.start),
                                                     static_cast<std::int64_t>(w.end) - 1);
    drafts.back().time = static_cast<Seconds>(when(rng));
  }
  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const Draft& a, const Draft& b) { return a.time < b.time; });

  std::vector<Request> out;
  out.reserve(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i)
    out.push_back(make_request(static_cast<RequestId>(i), drafts[i].origin,
                               drafts[i].destination, drafts[i].time, router, cfg.qos));
  return out;
}

void write_requests(std::span<const Request> requests, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "id,origin,destination,request_time_s\n";
  for (const Request& r : requests)
    out << r.id << ',' << r.origin << ',' << r.destination << ','
        << csv::format_double(r.request_time) << '\n';
}

std::vector<Request> load_requests(const std::filesystem::path& path, const Router& router,
                                   const QosParams& qos) {
  const auto table = csv::Table::read(path);
  const auto c_id = table.column("id");
  const auto c_o = table.column("origin");
  const auto c_d = table.column("destination");
  const auto c_t = table.column("request_time_s");
  std::vector<Request> out;
  for (const auto& rec : table.records()) {
    const auto id = table.integer(rec, c_id);
    const auto origin = table.integer(rec, c_o);
    const auto destination = table.integer(rec, c_d);
    const auto when = table.number(rec, c_t);
    try {
      out.push_back(make_request(id, origin, destination, when, router, qos));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(rec.line) + ": " + e.what());
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Request& a, const Request& b) {
    return a.request_time < b.request_time;
  });
  return out;
}

}  // namespace tirs
