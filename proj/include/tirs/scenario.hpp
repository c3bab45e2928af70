#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tirs/netgraph.hpp"
#include "tirs/transit.hpp"

namespace tirs {

// Rectangular street grid with two-way streets. Node id = row * cols + col,
// placed at (col * spacing, row * spacing).
struct GridSpec {
  std::size_t rows = 10;
  std::size_t cols = 20;
  Meters spacing = 500.0;
  Seconds edge_time = 50.0;
};

RoadGraph make_grid(const GridSpec& spec);

// Bus service along one row and one column of a grid, both directions.
struct CorridorSpec {
  std::size_t row = 5;
  std::size_t col = 10;
  std::size_t stop_every = 2;   // grid edges between consecutive stops
  Seconds dwell = 20.0;
  Seconds first_departure = 5.5 * 3600.0;
  Seconds last_departure = 20.0 * 3600.0;
  Seconds headway = 600.0;
  int capacity = 50;
};

TransitSchedule make_corridors(const GridSpec& grid, const CorridorSpec& spec);

// Runs every `headway` from first to last departure; each run dwells at the
// intermediate stops.
TransitLine make_line(const std::string& id, const std::vector<std::size_t>& stop_indices,
                      const std::vector<Seconds>& hop_times, Seconds dwell,
                      Seconds first_departure, Seconds last_departure, Seconds headway,
                      int capacity);

}  // namespace tirs
