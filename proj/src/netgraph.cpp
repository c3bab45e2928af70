#include "tirs/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <queue>
#include <string>
#include <tuple>

#include "tirs/csv.hpp"
#include "tirs/errors.hpp"

namespace tirs {

struct Router::Labels {
  std::vector<Seconds> time;
  std::vector<Meters> distance;
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Router::Labels dijkstra(const RoadGraph& g, std::size_t source) {
  Router::Labels lab;
  lab.time.assign(g.node_count(), kInf);
  lab.distance.assign(g.node_count(), kInf);
  using Entry = std::tuple<Seconds, Meters, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  lab.time[source] = 0.0;
  lab.distance[source] = 0.0;
  heap.emplace(0.0, 0.0, source);
  while (!heap.empty()) {
    auto [t, d, u] = heap.top();
    heap.pop();
    if (t != lab.time[u] || d != lab.distance[u]) continue;
    for (const Arc& a : g.out_arcs(u)) {
      const Seconds nt = t + a.travel_time;
      const Meters nd = d + a.distance;
      if (nt < lab.time[a.head] || (nt == lab.time[a.head] && nd < lab.distance[a.head])) {
        lab.time[a.head] = nt;
        lab.distance[a.head] = nd;
        heap.emplace(nt, nd, a.head);
      }
    }
  }
  return lab;
}

bool tight(const Router::Labels& lab, std::size_t tail, const Arc& a) {
  return lab.time[tail] + a.travel_time == lab.time[a.head] &&
         lab.distance[tail] + a.distance == lab.distance[a.head];
}

// Among all label-tight paths source -> target, walk forward picking the
// smallest next node id that can still reach the target over tight arcs.
PathResult extract_path(const RoadGraph& g, const Router::Labels& lab, std::size_t source,
                        std::size_t target) {
  std::vector<char> reaches(g.node_count(), 0);
  std::vector<std::size_t> stack{target};
  reaches[target] = 1;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (const Arc& in : g.in_arcs(v)) {
      const std::size_t u = in.head;
      if (reaches[u] || !std::isfinite(lab.time[u])) continue;
      if (lab.time[u] + in.travel_time == lab.time[v] &&
          lab.distance[u] + in.distance == lab.distance[v]) {
        reaches[u] = 1;
        stack.push_back(u);
      }
    }
  }

  PathResult out;
  out.travel_time = lab.time[target];
  out.distance = lab.distance[target];
  std::size_t u = source;
  out.node_sequence.push_back(g.id_at(u));
  while (u != target) {
    std::size_t best = u;
    for (const Arc& a : g.out_arcs(u)) {
      if (!reaches[a.head] || !tight(lab, u, a)) continue;
      if (best == u || g.id_at(a.head) < g.id_at(best)) best = a.head;
    }
    u = best;
    out.node_sequence.push_back(g.id_at(u));
  }
  return out;
}

}  // namespace

void RoadGraph::add_node(NodeId id, Point where) {
  if (index_.contains(id)) throw DataError("duplicate node id " + std::to_string(id));
  if (!std::isfinite(where.x) || !std::isfinite(where.y))
    throw DataError("node " + std::to_string(id) + " has non-finite coordinates");
  index_.emplace(id, ids_.size());
  ids_.push_back(id);
  coords_.push_back(where);
  out_.emplace_back();
  in_.emplace_back();
}

void RoadGraph::add_edge(NodeId from, NodeId to, Seconds travel_time, Meters distance) {
  if (!contains(from) || !contains(to))
    throw DataError("edge " + std::to_string(from) + "->" + std::to_string(to) +
                    " references an unknown node");
  if (!(travel_time > 0.0) || !std::isfinite(travel_time) || !(distance > 0.0) ||
      !std::isfinite(distance))
    throw DataError("edge " + std::to_string(from) + "->" + std::to_string(to) +
                    " has a non-positive or non-finite weight");
  const std::size_t u = index_.at(from);
  const std::size_t v = index_.at(to);
  auto better = [&](const Arc& a) {
    return std::tie(travel_time, distance) < std::tie(a.travel_time, a.distance);
  };
  for (Arc& a : out_[u]) {
    if (a.head != v) continue;
    if (better(a)) {
      a.travel_time = travel_time;
      a.distance = distance;
      for (Arc& r : in_[v])
        if (r.head == u) r.travel_time = travel_time, r.distance = distance;
    }
    return;
  }
  out_[u].push_back({v, travel_time, distance});
  in_[v].push_back({u, travel_time, distance});
  ++edge_count_;
}

std::size_t RoadGraph::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw DataError("unknown node id " + std::to_string(id));
  return it->second;
}

const Arc* RoadGraph::find_arc(NodeId from, NodeId to) const {
  const std::size_t v = index_of(to);
  for (const Arc& a : out_[index_of(from)])
    if (a.head == v) return &a;
  return nullptr;
}

std::optional<NodeId> RoadGraph::nearest_node(Point p) const {
  std::optional<NodeId> best;
  double best_d2 = kInf;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const double dx = coords_[i].x - p.x;
    const double dy = coords_[i].y - p.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2 || (d2 == best_d2 && ids_[i] < *best)) {
      best_d2 = d2;
      best = ids_[i];
    }
  }
  return best;
}

RoadGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph file '" + path.string() + "'");

  struct PendingEdge {
    std::size_t line;
    NodeId u, v;
    double t, d;
  };
  RoadGraph g;
  std::vector<PendingEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  auto fail = [&](const std::string& msg) -> DataError {
    return DataError(path.string() + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = csv::split(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (!header) {
      header = true;
      continue;
    }
    if (fields[0] == "node") {
      if (fields.size() != 4) throw fail("node record needs 4 fields");
      const NodeId id = csv::parse_int(fields[1], path, lineno);
      const double x = csv::parse_double(fields[2], path, lineno);
      const double y = csv::parse_double(fields[3], path, lineno);
      if (g.contains(id)) throw fail("duplicate node id " + fields[1]);
      g.add_node(id, {x, y});
    } else if (fields[0] == "edge") {
      if (fields.size() != 5) throw fail("edge record needs 5 fields");
      edges.push_back({lineno, csv::parse_int(fields[1], path, lineno),
                       csv::parse_int(fields[2], path, lineno),
                       csv::parse_double(fields[3], path, lineno),
                       csv::parse_double(fields[4], path, lineno)});
    } else {
      throw fail("unknown record kind '" + fields[0] + "'");
    }
  }
  if (!header) throw DataError(path.string() + ": empty graph file");
  for (const auto& e : edges) {
    lineno = e.line;
    if (!g.contains(e.u) || !g.contains(e.v))
      throw fail("dangling edge endpoint " +
                 std::to_string(g.contains(e.u) ? e.v : e.u));
    if (!(e.t > 0.0) || !(e.d > 0.0)) throw fail("non-positive edge weight");
    g.add_edge(e.u, e.v, e.t, e.d);
  }
  return g;
}

void write_graph(const RoadGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "kind,a,b,c,d\n";
  for (NodeId id : g.node_ids()) {
    const Point p = g.position(id);
    out << "node," << id << ',' << csv::format_double(p.x) << ',' << csv::format_double(p.y)
        << '\n';
  }
  for (std::size_t u = 0; u < g.node_count(); ++u)
    for (const Arc& a : g.out_arcs(u))
      out << "edge," << g.id_at(u) << ',' << g.id_at(a.head) << ','
          << csv::format_double(a.travel_time) << ',' << csv::format_double(a.distance)
          << '\n';
}

std::optional<PathResult> shortest_path(const RoadGraph& g, NodeId source, NodeId target) {
  const std::size_t s = g.index_of(source);
  const std::size_t t = g.index_of(target);
  const auto lab = dijkstra(g, s);
  if (!std::isfinite(lab.time[t])) return std::nullopt;
  return extract_path(g, lab, s, t);
}

std::optional<Seconds> walk_time(const RoadGraph& g, NodeId a, NodeId b, double walk_speed) {
  auto p = shortest_path(g, a, b);
  if (!p) return std::nullopt;
  return p->distance / walk_speed;
}

Router::Router(const RoadGraph& g) : graph_(g), cache_(g.node_count()) {}
Router::~Router() = default;

const Router::Labels& Router::labels(std::size_t source) const {
  {
    std::shared_lock lock(mutex_);
    if (cache_[source]) return *cache_[source];
  }
  auto fresh = std::make_unique<Labels>(dijkstra(graph_, source));
  std::unique_lock lock(mutex_);
  if (!cache_[source]) cache_[source] = std::move(fresh);
  return *cache_[source];
}

std::optional<TravelCost> Router::cost(NodeId source, NodeId target) const {
  const std::size_t t = graph_.index_of(target);
  const Labels& lab = labels(graph_.index_of(source));
  if (!std::isfinite(lab.time[t])) return std::nullopt;
  return TravelCost{lab.time[t], lab.distance[t]};
}

std::optional<PathResult> Router::path(NodeId source, NodeId target) const {
  const std::size_t s = graph_.index_of(source);
  const std::size_t t = graph_.index_of(target);
  const Labels& lab = labels(s);
  if (!std::isfinite(lab.time[t])) return std::nullopt;
  return extract_path(graph_, lab, s, t);
}

std::optional<Seconds> Router::walk_time(NodeId a, NodeId b, double walk_speed) const {
  auto c = cost(a, b);
  if (!c) return std::nullopt;
  return c->distance / walk_speed;
}

}  // namespace tirs
