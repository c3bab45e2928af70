#include "tirs/scenario.hpp"

#include <stdexcept>
#include <string>

namespace tirs {

RoadGraph make_grid(const GridSpec& spec) {
  if (spec.rows == 0 || spec.cols == 0 || spec.spacing <= 0.0 || spec.edge_time <= 0.0)
    throw std::invalid_argument("grid dimensions, spacing and edge time must be positive");
  RoadGraph g;
  auto id = [&](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * spec.cols + c); };
  for (std::size_t r = 0; r < spec.rows; ++r)
    for (std::size_t c = 0; c < spec.cols; ++c)
      g.add_node(id(r, c), {static_cast<double>(c) * spec.spacing,
                            static_cast<double>(r) * spec.spacing});
  for (std::size_t r = 0; r < spec.rows; ++r)
    for (std::size_t c = 0; c < spec.cols; ++c) {
      if (c + 1 < spec.cols) {
        g.add_edge(id(r, c), id(r, c + 1), spec.edge_time, spec.spacing);
        g.add_edge(id(r, c + 1), id(r, c), spec.edge_time, spec.spacing);
      }
      if (r + 1 < spec.rows) {
        g.add_edge(id(r, c), id(r + 1, c), spec.edge_time, spec.spacing);
        g.add_edge(id(r + 1, c), id(r, c), spec.edge_time, spec.spacing);
      }
    }
  return g;
}

TransitLine make_line(const std::string& id, const std::vector<std::size_t>& stop_indices,
                      const std::vector<Seconds>& hop_times, Seconds dwell,
                      Seconds first_departure, Seconds last_departure, Seconds headway,
                      int capacity) {
  if (stop_indices.size() < 2 || hop_times.size() + 1 != stop_indices.size())
    throw std::invalid_argument("a line needs at least two stops and one hop time per gap");
  if (headway <= 0.0) throw std::invalid_argument("headway must be positive");
  TransitLine line;
  line.id = id;
  line.stops = stop_indices;
  std::size_t k = 0;
  for (Seconds t = first_departure; t <= last_departure; t += headway, ++k) {
    TransitRun run;
    run.id = id + "-" + std::to_string(k);
    run.capacity = capacity;
    Seconds clock = t;
    for (std::size_t p = 0; p < stop_indices.size(); ++p) {
      if (p > 0) clock += hop_times[p - 1];
      run.arrival.push_back(clock);
      if (p > 0 && p + 1 < stop_indices.size()) clock += dwell;
      run.departure.push_back(clock);
    }
    line.runs.push_back(std::move(run));
  }
  return line;
}

TransitSchedule make_corridors(const GridSpec& grid, const CorridorSpec& spec) {
  if (spec.row >= grid.rows || spec.col >= grid.cols || spec.stop_every == 0)
    throw std::invalid_argument("corridor outside the grid");
  TransitSchedule s;
  auto stop_at = [&](std::size_t r, std::size_t c) {
    const NodeId node = static_cast<NodeId>(r * grid.cols + c);
    for (std::size_t i = 0; i < s.stops.size(); ++i)
      if (s.stops[i].node == node) return i;
    s.stops.push_back({"s" + std::to_string(node),
                       {static_cast<double>(c) * grid.spacing, static_cast<double>(r) * grid.spacing},
                       node});
    return s.stops.size() - 1;
  };

  std::vector<std::size_t> east, south;
  for (std::size_t c = 0; c < grid.cols; c += spec.stop_every) east.push_back(stop_at(spec.row, c));
  for (std::size_t r = 0; r < grid.rows; r += spec.stop_every) south.push_back(stop_at(r, spec.col));

  const Seconds hop = static_cast<Seconds>(spec.stop_every) * grid.edge_time;
  auto add = [&](const std::string& id, std::vector<std::size_t> stops) {
    if (stops.size() < 2) return;
    const std::vector<Seconds> hops(stops.size() - 1, hop);
    s.lines.push_back(make_line(id, stops, hops, spec.dwell, spec.first_departure,
                                spec.last_departure, spec.headway, spec.capacity));
  };
  add("east", east);
  add("west", {east.rbegin(), east.rend()});
  add("south", south);
  add("north", {south.rbegin(), south.rend()});
  return s;
}

}  // namespace tirs
