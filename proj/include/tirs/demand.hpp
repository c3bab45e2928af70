#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tirs/netgraph.hpp"

namespace tirs {

using RequestId = std::int64_t;

// Quality-of-service window: the journey may last (1 + alpha) * SPTT + beta.
struct QosParams {
  double alpha = 0.2;
  Seconds beta = 1200.0;
};

struct Request {
  RequestId id = 0;
  NodeId origin = 0;
  NodeId destination = 0;
  Seconds request_time = 0.0;  // earliest pickup
  Seconds sptt = 0.0;          // direct shortest-path travel time
  Meters direct_distance = 0.0;
  Seconds deadline = 0.0;      // latest arrival at the destination
};

Seconds max_travel_time(Seconds sptt, double alpha, Seconds beta);

// Builds a request with cached SPTT and deadline. Throws DataError if the
// endpoints coincide, are unknown, or are disconnected.
Request make_request(RequestId id, NodeId origin, NodeId destination, Seconds request_time,
                     const Router& router, const QosParams& qos);

struct TimeWindow {
  Seconds start = 0.0;
  Seconds end = 0.0;
};

struct DemandConfig {
  std::size_t count = 0;
  TimeWindow morning{6 * 3600.0, 8 * 3600.0};
  TimeWindow evening{16 * 3600.0, 18 * 3600.0};
  Meters min_trip_distance = 3000.0;
  QosParams qos;
  std::uint64_t seed = 1;
  std::size_t max_draws_per_request = 10000;
};

void validate(const DemandConfig& cfg);

// Uniform origin/destination sampling with rejection of short trips. The
// first half of the requests falls in the morning window, the rest in the
// evening window. Sorted by request time; ids follow that order.
std::vector<Request> generate_demand(const DemandConfig& cfg, const Router& router);

void write_requests(std::span<const Request> requests, const std::filesystem::path& path);
// Deadlines are recomputed from qos.
std::vector<Request> load_requests(const std::filesystem::path& path, const Router& router,
                                   const QosParams& qos);

}  // namespace tirs
