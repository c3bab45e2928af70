#include "tirs/simcore.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "tirs/errors.hpp"

namespace tirs {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Integrated: return "integrated";
    case Mode::RideshareOnly: return "rideshare";
    case Mode::MultiModalOnly: return "multimodal";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "integrated") return Mode::Integrated;
  if (s == "rideshare" || s == "rideshare-only") return Mode::RideshareOnly;
  if (s == "multimodal" || s == "multimodal-only") return Mode::MultiModalOnly;
  throw std::invalid_argument("unknown mode '" + s + "' (integrated, rideshare, multimodal)");
}

void SimConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  need(batch_window > 0.0 && std::isfinite(batch_window), "batch window must be positive");
  need(batch_cap > 0, "batch cap must be positive");
  need(vehicle_capacity > 0, "vehicle capacity must be positive");
  need(qos.alpha >= 0.0 && qos.beta >= 0.0, "alpha and beta must be non-negative");
  need(walk.speed > 0.0 && walk.max_walk >= 0.0, "walk speed must be positive");
  need(penalty_factor > 0.0, "penalty factor must be positive");
  need(!fixed_penalty || (*fixed_penalty >= 0.0 && std::isfinite(*fixed_penalty)),
       "fixed penalty must be finite and non-negative");
  need(max_trip_size > 0, "max trip size must be positive");
  need(max_route_events >= 2, "max route events must be at least 2");
  need(solver_time_limit > 0.0, "solver time limit must be positive");
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::VehicleStart: return "vehicle_start";
    case EventKind::RequestArrival: return "request";
    case EventKind::TransitOnly: return "transit_only";
    case EventKind::Assigned: return "assigned";
    case EventKind::Rejected: return "rejected";
    case EventKind::Unserved: return "unserved";
    case EventKind::Move: return "move";
    case EventKind::Pickup: return "pickup";
    case EventKind::Dropoff: return "dropoff";
    case EventKind::Board: return "board";
    case EventKind::Alight: return "alight";
    case EventKind::Completed: return "completed";
    case EventKind::BusViolation: return "bus_violation";
    case EventKind::Batch: return "batch";
    case EventKind::End: return "end";
  }
  return "?";
}

namespace {

struct Vehicle {
  VehicleState st;
  std::vector<RouteEvent> plan;
  std::vector<NodeId> path;  // toward plan.front()
  std::size_t hop = 0;
  NodeId path_origin = 0;
  Seconds path_start = 0.0;
  NodeId edge_from = -1;  // tail of the last edge started
  Seconds edge_depart = 0.0;
};

struct Journey {
  Request request;
  ServiceStatus status = ServiceStatus::Rejected;
};

}  // namespace

struct Simulation::Impl {
  SimConfig cfg;
  const RoadGraph& graph;
  const TransitSchedule& schedule;
  Router router;
  std::vector<Request> demand;
  std::size_t next_arrival = 0;
  CapacityLedger ledger;
  std::vector<Vehicle> vehicles;
  std::unordered_map<RequestId, Journey> journeys;
  std::vector<Request> backlog;
  std::vector<SimEvent> log;
  std::vector<BatchRecord> batches;
  std::multimap<std::pair<Seconds, std::size_t>, SimEvent> timed;
  std::size_t timed_seq = 0;
  Seconds clock = 0.0;
  bool started = false;

  Impl(const SimConfig& c, const RoadGraph& g, const TransitSchedule& s, std::vector<Request> d)
      : cfg(c), graph(g), schedule(s), router(g), demand(std::move(d)), ledger(s) {}

  void schedule_event(const SimEvent& e) { timed.emplace(std::pair{e.time, timed_seq++}, e); }

  void complete(RequestId id, Seconds when, std::vector<SimEvent>& out) {
    auto& j = journeys.at(id);
    SimEvent e{.kind = EventKind::Completed, .time = when, .request = id};
    e.option = j.status;
    e.deadline = j.request.deadline;
    out.push_back(e);
  }

  void execute(Vehicle& v, const RouteEvent& ev, Seconds at, std::vector<SimEvent>& out) {
    SimEvent e{.time = at, .request = ev.request, .vehicle = v.st.id, .node = ev.node};
    e.segment = ev.kind;
    if (ev.type == EventType::Pickup) {
      auto it = std::find_if(v.st.pending.begin(), v.st.pending.end(), [&](const TravelSegment& s) {
        return s.request == ev.request && s.kind == ev.kind;
      });
      if (it == v.st.pending.end())
        throw std::logic_error("pickup without a committed segment for request " +
                               std::to_string(ev.request));
      v.st.onboard.push_back({it->request, it->kind, it->dropoff, it->dropoff_deadline});
      v.st.pending.erase(it);
      e.kind = EventKind::Pickup;
      out.push_back(e);
      return;
    }
    auto it = std::find_if(v.st.onboard.begin(), v.st.onboard.end(), [&](const OnboardPassenger& p) {
      return p.request == ev.request && p.kind == ev.kind;
    });
    if (it == v.st.onboard.end())
      throw std::logic_error("dropoff of a passenger not on board, request " +
                             std::to_string(ev.request));
    v.st.onboard.erase(it);
    e.kind = EventKind::Dropoff;
    out.push_back(e);
    if (ev.kind != SegmentKind::FirstMile) complete(ev.request, at, out);
  }

  void step(Vehicle& v, Seconds until, std::vector<SimEvent>& out) {
    while (!v.plan.empty()) {
      const RouteEvent ev = v.plan.front();
      if (v.st.location != ev.node) {
        if (v.path.empty() || v.path.back() != ev.node || v.hop >= v.path.size() ||
            v.path[v.hop] != v.st.location) {
          auto p = router.path(v.st.location, ev.node);
          if (!p)
            throw std::runtime_error("vehicle " + std::to_string(v.st.id) + " cannot reach node " +
                                     std::to_string(ev.node));
          v.path = std::move(p->node_sequence);
          v.hop = 0;
          v.path_origin = v.st.location;
          v.path_start = v.st.available_time;
        }
        const Seconds depart = v.st.available_time;
        if (!(depart < until)) return;
        const NodeId next = v.path[v.hop + 1];
        const Seconds arrive = v.path_start + router.cost(v.path_origin, next)->time;
        const Arc* arc = graph.find_arc(v.st.location, next);
        SimEvent e{.kind = EventKind::Move, .time = depart, .vehicle = v.st.id,
                   .node = v.st.location, .to = next};
        e.distance = arc ? arc->distance : 0.0;
        out.push_back(e);
        v.edge_from = v.st.location;
        v.edge_depart = depart;
        v.st.location = next;
        v.st.available_time = arrive;
        ++v.hop;
        continue;
      }
      Seconds service = v.st.available_time;
      if (ev.type == EventType::Pickup) service = std::max(service, ev.earliest);
      if (service > until) return;
      execute(v, ev, service, out);
      v.st.available_time = service;
      v.plan.erase(v.plan.begin());
      v.path.clear();
    }
  }

  void advance(Seconds until) {
    if (until < clock)
      throw std::invalid_argument("cannot advance backwards from " + std::to_string(clock));
    std::vector<SimEvent> out;
    for (auto& v : vehicles) step(v, until, out);
    while (!timed.empty() && timed.begin()->first.first <= until) {
      out.push_back(timed.begin()->second);
      timed.erase(timed.begin());
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SimEvent& a, const SimEvent& b) { return a.time < b.time; });
    Seconds last = clock;
    for (auto& e : out) {
      last = std::max(last, e.time);
      log.push_back(std::move(e));
    }
    clock = std::isfinite(until) ? until : last;
  }

  void start() {
    if (started) return;
    started = true;
    for (const auto& v : vehicles) {
      SimEvent e{.kind = EventKind::VehicleStart, .time = clock, .vehicle = v.st.id,
                 .node = v.st.location};
      log.push_back(e);
    }
  }

  // Books the bus part of a journey and its walking tail.
  void book_transit(const Request& r, const TransitLeg& leg, const TravelSegment* last_mile,
                    std::size_t batch, std::vector<SimEvent>& out, BatchRecord& rec) {
    try {
      ledger.reserve(leg);
    } catch (const CapacityError&) {
      SimEvent v{.kind = EventKind::BusViolation, .time = clock, .request = r.id};
      v.leg = leg;
      v.batch = batch;
      out.push_back(v);
      ++rec.violations;
    }
    SimEvent board{.kind = EventKind::Board, .time = leg.board_time, .request = r.id,
                   .node = leg.depart_node};
    board.leg = leg;
    schedule_event(board);
    SimEvent alight{.kind = EventKind::Alight, .time = leg.alight_time, .request = r.id,
                    .node = leg.arrive_node};
    alight.leg = leg;
    schedule_event(alight);
    if (last_mile && last_mile->empty) {
      SimEvent done{.kind = EventKind::Completed, .time = leg.alight_time + last_mile->walk_time,
                    .request = r.id};
      done.option = journeys.at(r.id).status;
      done.deadline = r.deadline;
      schedule_event(done);
    }
  }

  BatchRecord run_batch(Seconds now, std::span<const Request> arrivals) {
    start();
    advance(now);
    const auto t0 = std::chrono::steady_clock::now();
    BatchRecord rec;
    rec.index = batches.size();
    rec.time = now;
    std::vector<SimEvent> out;

    for (const auto& r : arrivals) {
      if (journeys.contains(r.id))
        throw StructuralError("request " + std::to_string(r.id) + " arrived twice");
      journeys.emplace(r.id, Journey{r});
      SimEvent e{.kind = EventKind::RequestArrival, .time = r.request_time, .request = r.id,
                 .node = r.origin, .to = r.destination};
      e.distance = r.direct_distance;
      e.deadline = r.deadline;
      out.push_back(e);
    }
    std::vector<Request> candidates = std::move(backlog);
    backlog.clear();
    candidates.insert(candidates.end(), arrivals.begin(), arrivals.end());

    const bool allow_direct = cfg.mode != Mode::MultiModalOnly;
    const bool allow_transit = cfg.mode != Mode::RideshareOnly;
    std::vector<Request> batch_requests;
    std::vector<TravelSegment> segments;
    for (const auto& r : candidates) {
      const auto legs = enumerate_legs(r, schedule, router, now, ledger);
      auto segs = decompose(r, legs, router, cfg.walk, now);
      // Walk-only transit journeys are served at no fleet cost.
      bool walked = false;
      for (std::size_t k = 1; k + 1 < segs.size(); k += 2) {
        if (!segs[k].empty || !segs[k + 1].empty) continue;
        journeys.at(r.id).status = ServiceStatus::MultiModal;
        SimEvent e{.kind = EventKind::TransitOnly, .time = now, .request = r.id};
        e.leg = segs[k].leg;
        e.first_mile_empty = e.last_mile_empty = true;
        out.push_back(e);
        book_transit(r, *segs[k].leg, &segs[k + 1], rec.index, out, rec);
        walked = true;
        break;
      }
      if (walked) continue;

      std::vector<TravelSegment> kept;
      const TravelSegment& direct = segs.front();
      if (allow_direct && direct.pickup_earliest <= direct.pickup_latest) kept.push_back(direct);
      if (allow_transit) kept.insert(kept.end(), segs.begin() + 1, segs.end());
      if (kept.empty()) {
        SimEvent e{.kind = EventKind::Unserved, .time = now, .request = r.id};
        e.distance = r.direct_distance;
        out.push_back(e);
        continue;
      }
      batch_requests.push_back(r);
      segments.insert(segments.end(), kept.begin(), kept.end());
    }
    rec.requests = batch_requests.size();

    if (!batch_requests.empty()) {
      std::vector<VehicleState> states;
      states.reserve(vehicles.size());
      for (const auto& v : vehicles) states.push_back(v.st);
      rec.vehicles = states.size();

      TirtvOptions topt;
      topt.max_trip_size = cfg.max_trip_size;
      topt.single_request_trips = cfg.single_request_trips;
      topt.pdp = PdpOptions{cfg.metric, cfg.max_route_events};
      topt.threads = cfg.threads;
      const Shareability share = build_shareability(segments, states, router, now, topt);
      const auto trips = build_trips(share, cfg.max_trip_size);
      const TirtvGraph g =
          build_tirtv(batch_requests, segments, trips, states, router, now, topt, &share);
      rec.segments = g.segments.size();
      rec.trips = g.trips.size();
      rec.trip_vehicle_edges = g.trip_vehicle.size();

      const auto penalties = cfg.fixed_penalty
                                 ? std::vector<double>(g.requests.size(), *cfg.fixed_penalty)
                                 : default_penalties(g, cfg.metric, cfg.penalty_factor);
      const IlpModel model = build_ilp(g, penalties);
      const AssignmentSolution sol = solve_ilp(model, cfg.solver_time_limit);
      rec.objective = sol.objective;
      rec.optimal = sol.stats.optimal;
      rec.nodes = sol.stats.nodes;

      for (const auto& v : validate_solution(g, sol, router, &ledger))
        if (v.kind != ViolationKind::BusCapacity)
          throw std::logic_error("batch " + std::to_string(rec.index) + ": " + to_string(v.kind) +
                                 ": " + v.message);

      if (cfg.check_dominance && cfg.mode == Mode::Integrated) {
        const TirtvGraph twin = restrict_to_direct(g);
        const AssignmentSolution tsol = solve_ilp(build_ilp(twin, penalties), cfg.solver_time_limit);
        rec.twin_objective = tsol.objective;
      }
      commit(g, sol, now, rec, out);
    }

    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    SimEvent b{.kind = EventKind::Batch, .time = now};
    b.batch = rec.index;
    b.count = rec.requests;
    b.objective = rec.objective;
    b.twin_objective = rec.twin_objective;
    b.wall_seconds = rec.wall_seconds;
    b.optimal = rec.optimal;
    out.push_back(b);
    for (auto& e : out) log.push_back(std::move(e));
    batches.push_back(rec);
    return rec;
  }

  void commit(const TirtvGraph& g, const AssignmentSolution& sol, Seconds now, BatchRecord& rec,
              std::vector<SimEvent>& out) {
    const PdpOptions pdp{cfg.metric, cfg.max_route_events};
    std::vector<std::size_t> trip_vehicle(g.trips.size(), kDummyVehicle);
    std::vector<char> moved(vehicles.size(), 0);
    for (std::size_t e : sol.chosen) {
      const auto& edge = g.trip_vehicle[e];
      if (edge.dummy()) continue;
      trip_vehicle[edge.trip] = edge.vehicle;
      Vehicle& v = vehicles[edge.vehicle];
      for (std::size_t s : g.trips[edge.trip].segments) v.st.pending.push_back(g.segments[s]);
      v.plan = edge.route.events;
      v.path.clear();
      v.st.available_time = std::max(now, v.st.available_time);
      moved[edge.vehicle] = 1;
    }
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
      if (moved[i]) continue;
      Vehicle& v = vehicles[i];
      if (v.plan.empty()) continue;
      const PdpRoute base = base_route(v.st, router, now, pdp);
      if (!base.feasible) continue;
      v.plan = base.events;
      v.path.clear();
      v.st.available_time = std::max(now, v.st.available_time);
    }

    auto vehicle_of = [&](std::optional<std::size_t> trip) -> VehicleId {
      if (!trip || trip_vehicle[*trip] == kDummyVehicle) return -1;
      return vehicles[trip_vehicle[*trip]].st.id;
    };
    auto find_mile = [&](RequestId id, SegmentKind kind, const TransitLeg& leg) {
      for (const auto& s : g.segments)
        if (s.request == id && s.kind == kind && s.leg == leg) return &s;
      return static_cast<const TravelSegment*>(nullptr);
    };

    for (std::size_t r = 0; r < g.requests.size(); ++r) {
      const Request& req = g.requests[r];
      const RequestOutcome& o = sol.requests[r];
      Journey& j = journeys.at(req.id);
      j.status = o.status;
      if (o.status == ServiceStatus::Rejected) {
        backlog.push_back(req);
        out.push_back({.kind = EventKind::Rejected, .time = now, .request = req.id});
        continue;
      }
      SimEvent e{.kind = EventKind::Assigned, .time = now, .request = req.id};
      e.option = o.status;
      e.batch = rec.index;
      if (o.status == ServiceStatus::Direct) {
        e.vehicle = vehicle_of(o.direct_trip);
        out.push_back(e);
        continue;
      }
      const TravelSegment* fm = find_mile(req.id, SegmentKind::FirstMile, *o.leg);
      const TravelSegment* lm = find_mile(req.id, SegmentKind::LastMile, *o.leg);
      e.leg = o.leg;
      e.first_mile_empty = fm && fm->empty;
      e.last_mile_empty = lm && lm->empty;
      e.miles_share_vehicle = !e.first_mile_empty && !e.last_mile_empty &&
                              o.first_mile_trip == o.last_mile_trip;
      e.vehicle = e.first_mile_empty ? vehicle_of(o.last_mile_trip) : vehicle_of(o.first_mile_trip);
      out.push_back(e);
      book_transit(req, *o.leg, lm, rec.index, out, rec);
    }
  }

  void run() {
    start();
    std::size_t n = demand.size();
    Seconds open = clock;
    while (next_arrival < n || !backlog.empty()) {
      if (backlog.empty()) open = std::max(open, demand[next_arrival].request_time);
      const Seconds close = open + cfg.batch_window;
      std::vector<Request> arrivals;
      Seconds decision = close;
      while (next_arrival < n && demand[next_arrival].request_time < close &&
             arrivals.size() < cfg.batch_cap) {
        arrivals.push_back(demand[next_arrival++]);
        if (arrivals.size() == cfg.batch_cap) decision = std::max(open, arrivals.back().request_time);
      }
      try {
        run_batch(decision, arrivals);
      } catch (const std::exception& e) {
        throw std::runtime_error("batch " + std::to_string(batches.size()) + " at t=" +
                                 std::to_string(decision) + ": " + e.what());
      }
      open = decision;
    }
    advance(std::numeric_limits<Seconds>::infinity());
    log.push_back({.kind = EventKind::End, .time = clock});
  }
};

Simulation::Simulation(const SimConfig& cfg, const RoadGraph& g, const TransitSchedule& schedule,
                       std::vector<Request> demand) {
  cfg.validate();
  std::unordered_map<RequestId, int> seen;
  for (auto& r : demand) {
    if (!g.contains(r.origin) || !g.contains(r.destination))
      throw DataError("request " + std::to_string(r.id) + " references an unknown node");
    if (seen[r.id]++) throw DataError("duplicate request id " + std::to_string(r.id));
    r.deadline = r.request_time + max_travel_time(r.sptt, cfg.qos.alpha, cfg.qos.beta);
  }
  std::stable_sort(demand.begin(), demand.end(), [](const Request& a, const Request& b) {
    return a.request_time < b.request_time;
  });
  impl_ = new Impl(cfg, g, schedule, std::move(demand));
  if (g.node_count() == 0 && cfg.fleet_size > 0) {
    delete impl_;
    throw DataError("cannot place vehicles on an empty graph");
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.node_count() ? g.node_count() - 1 : 0);
  for (std::size_t i = 0; i < cfg.fleet_size; ++i) {
    Vehicle v;
    v.st.id = static_cast<VehicleId>(i);
    v.st.capacity = cfg.vehicle_capacity;
    v.st.location = g.id_at(pick(rng));
    impl_->vehicles.push_back(std::move(v));
  }
  if (!impl_->demand.empty()) impl_->clock = 0.0;
}

Simulation::~Simulation() { delete impl_; }

void Simulation::advance(Seconds until) {
  impl_->start();
  impl_->advance(until);
}
BatchRecord Simulation::run_batch(Seconds now, std::span<const Request> arrivals) {
  return impl_->run_batch(now, arrivals);
}
void Simulation::run() { impl_->run(); }
Seconds Simulation::clock() const { return impl_->clock; }
const std::vector<SimEvent>& Simulation::log() const { return impl_->log; }
const std::vector<BatchRecord>& Simulation::batches() const { return impl_->batches; }
const CapacityLedger& Simulation::ledger() const { return impl_->ledger; }
std::size_t Simulation::backlog_size() const { return impl_->backlog.size(); }
const Router& Simulation::router() const { return impl_->router; }

bool Simulation::idle() const {
  if (!impl_->timed.empty()) return false;
  return std::all_of(impl_->vehicles.begin(), impl_->vehicles.end(),
                     [](const Vehicle& v) { return v.plan.empty(); });
}

void Simulation::place_vehicle(std::size_t i, NodeId node) {
  if (impl_->started) throw std::logic_error("vehicles can only be placed before the first batch");
  if (!impl_->graph.contains(node)) throw DataError("unknown node " + std::to_string(node));
  impl_->vehicles.at(i).st.location = node;
}

std::vector<VehicleSnapshot> Simulation::vehicles() const {
  std::vector<VehicleSnapshot> out;
  const Seconds now = impl_->clock;
  for (const auto& v : impl_->vehicles) {
    VehicleSnapshot s;
    s.id = v.st.id;
    s.location = v.st.location;
    s.available_time = v.st.available_time;
    s.onboard = v.st.onboard.size();
    s.pending = v.st.pending.size();
    s.planned_events = v.plan.size();
    const Point head = impl_->graph.position(v.st.location);
    s.position = head;
    if (v.edge_from >= 0 && v.st.available_time > now && v.st.available_time > v.edge_depart) {
      const Point tail = impl_->graph.position(v.edge_from);
      const double f = (now - v.edge_depart) / (v.st.available_time - v.edge_depart);
      s.position = {tail.x + f * (head.x - tail.x), tail.y + f * (head.y - tail.y)};
    }
    out.push_back(s);
  }
  return out;
}

std::size_t fleet_for_ratio(double per_thousand, std::size_t requests) {
  if (!(per_thousand > 0.0)) throw std::invalid_argument("fleet ratio must be positive");
  const long n = std::lround(per_thousand * static_cast<double>(requests) / 1000.0);
  return static_cast<std::size_t>(std::max(1L, n));
}

SimResult run(const SimConfig& cfg, const RoadGraph& g, const TransitSchedule& schedule,
              std::vector<Request> demand) {
  Simulation sim(cfg, g, schedule, std::move(demand));
  sim.run();
  SimResult res;
  res.log = sim.log();
  res.batches = sim.batches();
  res.metrics = compute_metrics(res.log);
  return res;
}

}  // namespace tirs
