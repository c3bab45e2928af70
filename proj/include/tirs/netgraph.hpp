#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

namespace tirs {

using NodeId = std::int64_t;
using Seconds = double;
using Meters = double;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Arc {
  std::size_t head = 0;  // dense node index
  Seconds travel_time = 0.0;
  Meters distance = 0.0;
};

// Directed road network with planar coordinates. Nodes are addressed by their
// opaque file ids; dense indices are an implementation detail exposed for the
// routing code. Parallel arcs collapse to the one with the smaller
// (travel_time, distance).
class RoadGraph {
 public:
  void add_node(NodeId id, Point where);
  void add_edge(NodeId from, NodeId to, Seconds travel_time, Meters distance);

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  bool contains(NodeId id) const { return index_.contains(id); }
  std::size_t index_of(NodeId id) const;
  NodeId id_at(std::size_t index) const { return ids_[index]; }
  Point position(NodeId id) const { return coords_[index_of(id)]; }
  std::span<const NodeId> node_ids() const { return ids_; }

  std::span<const Arc> out_arcs(std::size_t index) const { return out_[index]; }
  std::span<const Arc> in_arcs(std::size_t index) const { return in_[index]; }
  const Arc* find_arc(NodeId from, NodeId to) const;

  // Closest node by straight-line distance; ties go to the smaller id.
  std::optional<NodeId> nearest_node(Point p) const;

 private:
  std::vector<NodeId> ids_;
  std::vector<Point> coords_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<Arc>> in_;  // head = tail index of the original arc
  std::size_t edge_count_ = 0;
};

struct PathResult {
  Seconds travel_time = 0.0;
  Meters distance = 0.0;
  std::vector<NodeId> node_sequence;
};

// Reads the node/edge CSV format. Every problem is reported as a DataError
// carrying "<file>:<line>:".
RoadGraph load_graph(const std::filesystem::path& path);
void write_graph(const RoadGraph& g, const std::filesystem::path& path);

// Minimum travel time path. Ties are broken by smaller distance, then by the
// lexicographically smaller node sequence. std::nullopt means unreachable.
std::optional<PathResult> shortest_path(const RoadGraph& g, NodeId source, NodeId target);

// Walking time along the network (distance of the fastest driving path).
std::optional<Seconds> walk_time(const RoadGraph& g, NodeId a, NodeId b, double walk_speed);

struct TravelCost {
  Seconds time = 0.0;
  Meters distance = 0.0;
};

// Memoizes single-source labels. Safe for concurrent queries; the graph must
// outlive the router.
class Router {
 public:
  explicit Router(const RoadGraph& g);
  ~Router();
  Router(const Router&) = delete;
  Router& operator=(const Router&) = delete;

  const RoadGraph& graph() const { return graph_; }

  std::optional<TravelCost> cost(NodeId source, NodeId target) const;
  std::optional<PathResult> path(NodeId source, NodeId target) const;
  std::optional<Seconds> walk_time(NodeId a, NodeId b, double walk_speed) const;

  struct Labels;

 private:
  const Labels& labels(std::size_t source) const;

  const RoadGraph& graph_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<std::unique_ptr<Labels>> cache_;
};

}  // namespace tirs
