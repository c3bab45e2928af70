#include "tirs/assign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "tirs/errors.hpp"
#include "tirs/lp.hpp"

namespace tirs {

const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::VehicleOnce: return "vehicle-once";
    case ConstraintKind::SingleOption: return "single-option";
    case ConstraintKind::MileConsistency: return "mile-consistency";
    case ConstraintKind::TripServed: return "trip-served";
  }
  return "?";
}

const char* to_string(ServiceStatus s) {
  switch (s) {
    case ServiceStatus::Direct: return "direct";
    case ServiceStatus::MultiModal: return "multimodal";
    case ServiceStatus::Rejected: return "rejected";
  }
  return "?";
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Shape: return "shape";
    case ViolationKind::NotBinary: return "not-binary";
    case ViolationKind::VehicleOnce: return "vehicle-once";
    case ViolationKind::SingleOption: return "single-option";
    case ViolationKind::MileConsistency: return "mile-consistency";
    case ViolationKind::TripServed: return "trip-served";
    case ViolationKind::Route: return "route";
    case ViolationKind::BusCapacity: return "bus-capacity";
  }
  return "?";
}

namespace {

// What a trip carries for one request.
struct Roles {
  std::optional<TransitLeg> first, last;
  bool direct = false;
};

Roles roles_of(const TirtvGraph& g, std::size_t request, std::size_t trip) {
  Roles out;
  const RequestId id = g.requests[request].id;
  for (std::size_t s : g.trips[trip].segments) {
    const TravelSegment& seg = g.segments[s];
    if (seg.request != id) continue;
    switch (seg.kind) {
      case SegmentKind::FirstMile:
        if (!out.first) out.first = seg.leg;
        break;
      case SegmentKind::LastMile:
        if (!out.last) out.last = seg.leg;
        break;
      case SegmentKind::Direct:
        out.direct = true;
        break;
    }
  }
  return out;
}

// Legs offered to each request, ascending.
std::vector<std::vector<TransitLeg>> offered_legs(const TirtvGraph& g) {
  std::vector<std::vector<TransitLeg>> out(g.requests.size());
  std::map<RequestId, std::size_t> index;
  for (std::size_t r = 0; r < g.requests.size(); ++r) index.emplace(g.requests[r].id, r);
  for (const auto& s : g.segments) {
    if (s.kind == SegmentKind::Direct || !s.leg) continue;
    auto it = index.find(s.request);
    if (it != index.end()) out[it->second].push_back(*s.leg);
  }
  for (auto& legs : out) {
    std::sort(legs.begin(), legs.end());
    legs.erase(std::unique(legs.begin(), legs.end()), legs.end());
  }
  return out;
}

// Sorts by column, merges duplicate columns and drops zero coefficients.
void normalize(std::vector<std::pair<std::size_t, double>>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (out > 0 && terms[out - 1].first == terms[k].first)
      terms[out - 1].second += terms[k].second;
    else
      terms[out++] = terms[k];
  }
  terms.resize(out);
  std::erase_if(terms, [](const auto& t) { return t.second == 0.0; });
}

double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

std::vector<double> default_penalties(const TirtvGraph& g, CostMetric metric, double factor) {
  double largest = 0.0;
  for (const auto& e : g.trip_vehicle) largest = std::max(largest, e.cost);
  std::vector<double> out;
  out.reserve(g.requests.size());
  for (const auto& r : g.requests)
    out.push_back(factor *
                  (largest + (metric == CostMetric::Distance ? r.direct_distance : r.sptt)));
  return out;
}

IlpModel build_ilp(const TirtvGraph& g, std::span<const double> penalties) {
  const std::size_t R = g.requests.size();
  const std::size_t T = g.trips.size();
  const std::size_t V = g.vehicles.size();
  if (penalties.size() != R)
    throw StructuralError("penalty count " + std::to_string(penalties.size()) +
                          " does not match request count " + std::to_string(R));
  for (double p : penalties)
    if (!std::isfinite(p) || p < 0.0) throw StructuralError("penalties must be finite and >= 0");
  for (const auto& e : g.request_trip)
    if (e.request >= R || e.trip >= T) throw StructuralError("request-trip edge out of range");
  for (const auto& e : g.trip_vehicle) {
    if (e.trip >= T || (!e.dummy() && e.vehicle >= V))
      throw StructuralError("trip-vehicle edge out of range");
    if (!std::isfinite(e.cost)) throw StructuralError("trip-vehicle cost is not finite");
  }

  IlpModel m;
  m.trip_count = T;
  m.penalties.assign(penalties.begin(), penalties.end());
  m.x_count = g.trip_vehicle.size();
  m.y_count = g.request_trip.size();
  m.z_count = R;
  m.first_mile_trips.resize(R);
  m.last_mile_trips.resize(R);
  m.direct_trips.resize(R);

  std::vector<std::vector<std::size_t>> x_by_trip(T);
  for (std::size_t e = 0; e < g.trip_vehicle.size(); ++e) {
    const auto& edge = g.trip_vehicle[e];
    m.variables.push_back({VarKind::TripVehicle, e, edge.cost});
    m.x_trip.push_back(edge.trip);
    m.x_vehicle.push_back(edge.vehicle);
    x_by_trip[edge.trip].push_back(e);
  }
  for (std::size_t e = 0; e < g.request_trip.size(); ++e) {
    const auto& edge = g.request_trip[e];
    m.variables.push_back({VarKind::RequestTrip, e, 0.0});
    const Roles roles = roles_of(g, edge.request, edge.trip);
    m.y_request.push_back(edge.request);
    m.y_trip.push_back(edge.trip);
    m.y_first_leg.push_back(roles.first);
    m.y_last_leg.push_back(roles.last);
    m.y_direct.push_back(roles.direct ? 1 : 0);
    if (roles.first) m.first_mile_trips[edge.request].push_back(edge.trip);
    if (roles.last) m.last_mile_trips[edge.request].push_back(edge.trip);
    if (roles.direct) m.direct_trips[edge.request].push_back(edge.trip);
  }
  for (std::size_t r = 0; r < R; ++r) m.variables.push_back({VarKind::Reject, r, penalties[r]});

  m.rows.reserve(V + R + m.y_count + m.y_count / 2);
  // Each real vehicle serves at most one trip.
  std::vector<IlpRow> vehicle_rows(V);
  for (std::size_t v = 0; v < V; ++v) {
    vehicle_rows[v].kind = ConstraintKind::VehicleOnce;
    vehicle_rows[v].equality = false;
    vehicle_rows[v].rhs = 1.0;
    vehicle_rows[v].owner = v;
  }
  for (std::size_t e = 0; e < m.x_count; ++e)
    if (m.x_vehicle[e] != kDummyVehicle) vehicle_rows[m.x_vehicle[e]].terms.emplace_back(e, 1.0);
  for (auto& row : vehicle_rows) m.rows.push_back(std::move(row));

  // One option or rejection per request.
  std::vector<IlpRow> option_rows(R);
  for (std::size_t r = 0; r < R; ++r) {
    option_rows[r].kind = ConstraintKind::SingleOption;
    option_rows[r].rhs = 1.0;
    option_rows[r].owner = r;
  }
  for (std::size_t e = 0; e < m.y_count; ++e) {
    const std::size_t r = m.y_request[e];
    if (m.y_first_leg[e]) option_rows[r].terms.emplace_back(m.y(e), 1.0);
    if (m.y_direct[e]) option_rows[r].terms.emplace_back(m.y(e), 1.0);
  }
  for (std::size_t r = 0; r < R; ++r) {
    option_rows[r].terms.emplace_back(m.z(r), 1.0);
    normalize(option_rows[r].terms);
    m.rows.push_back(std::move(option_rows[r]));
  }

  // First and last mile of a leg are chosen together.
  const auto legs = offered_legs(g);
  std::vector<std::size_t> leg_row_start(R + 1, m.rows.size());
  for (std::size_t r = 0; r < R; ++r) {
    for (const auto& leg : legs[r]) {
      IlpRow row;
      row.kind = ConstraintKind::MileConsistency;
      row.owner = r;
      row.leg = leg;
      m.rows.push_back(std::move(row));
    }
    leg_row_start[r + 1] = m.rows.size();
  }
  auto leg_row = [&](std::size_t r, const TransitLeg& leg) -> IlpRow& {
    const auto first = legs[r].begin();
    const auto it = std::lower_bound(first, legs[r].end(), leg);
    return m.rows[leg_row_start[r] + static_cast<std::size_t>(it - first)];
  };
  for (std::size_t e = 0; e < m.y_count; ++e) {
    const std::size_t r = m.y_request[e];
    if (m.y_first_leg[e]) leg_row(r, *m.y_first_leg[e]).terms.emplace_back(m.y(e), 1.0);
    if (m.y_last_leg[e]) leg_row(r, *m.y_last_leg[e]).terms.emplace_back(m.y(e), -1.0);
  }
  for (std::size_t k = leg_row_start[0]; k < leg_row_start[R]; ++k) normalize(m.rows[k].terms);

  // A trip chosen for a request is served by exactly one vehicle.
  for (std::size_t e = 0; e < m.y_count; ++e) {
    IlpRow row;
    row.kind = ConstraintKind::TripServed;
    row.owner = e;
    for (std::size_t x : x_by_trip[m.y_trip[e]]) row.terms.emplace_back(m.x(x), 1.0);
    row.terms.emplace_back(m.y(e), -1.0);
    m.rows.push_back(std::move(row));
  }
  return m;
}

std::string to_lp_format(const IlpModel& m) {
  auto name = [&](std::size_t j) {
    if (j < m.x_count) return "x" + std::to_string(j);
    if (j < m.x_count + m.y_count) return "y" + std::to_string(j - m.x_count);
    return "z" + std::to_string(j - m.x_count - m.y_count);
  };
  auto number = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  auto write_terms = [&](std::ostringstream& os, const std::vector<std::pair<std::size_t, double>>& terms) {
    if (terms.empty()) {
      os << " 0 " << name(0);
      return;
    }
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto [j, a] = terms[k];
      if (k > 0 && k % 8 == 0) os << "\n   ";
      os << (a < 0 ? " - " : (k == 0 ? " " : " + ")) << number(std::abs(a)) << ' ' << name(j);
    }
  };

  std::ostringstream os;
  os << "\\ ride-sharing assignment\nMinimize\n obj:";
  std::vector<std::pair<std::size_t, double>> obj;
  for (std::size_t j = 0; j < m.variables.size(); ++j)
    if (m.variables[j].cost != 0.0) obj.emplace_back(j, m.variables[j].cost);
  write_terms(os, obj);
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const IlpRow& row = m.rows[i];
    if (row.terms.empty()) continue;
    std::string label = to_string(row.kind);
    std::replace(label.begin(), label.end(), '-', '_');
    os << ' ' << label << '_' << i << ':';
    write_terms(os, row.terms);
    os << (row.equality ? " = " : " <= ") << number(row.rhs) << '\n';
  }
  os << "Binary\n";
  for (std::size_t j = 0; j < m.variables.size(); ++j) os << ' ' << name(j) << '\n';
  os << "End\n";
  return os.str();
}

double objective_value(const IlpModel& m, std::span<const std::uint8_t> values) {
  std::vector<double> costs;
  for (std::size_t j = 0; j < values.size() && j < m.variables.size(); ++j)
    if (values[j]) costs.push_back(m.variables[j].cost);
  return sorted_sum(std::move(costs));
}

AssignmentSolution decode(const IlpModel& m, std::vector<std::uint8_t> values) {
  AssignmentSolution sol;
  sol.requests.resize(m.z_count);
  for (std::size_t e = 0; e < m.x_count; ++e)
    if (values[m.x(e)]) sol.chosen.push_back(e);
  for (std::size_t e = 0; e < m.y_count; ++e) {
    if (!values[m.y(e)]) continue;
    RequestOutcome& out = sol.requests[m.y_request[e]];
    if (m.y_direct[e] && !out.direct_trip) out.direct_trip = m.y_trip[e];
    if (m.y_first_leg[e] && !out.first_mile_trip) {
      out.first_mile_trip = m.y_trip[e];
      out.leg = m.y_first_leg[e];
    }
    if (m.y_last_leg[e] && !out.last_mile_trip) out.last_mile_trip = m.y_trip[e];
  }
  for (std::size_t r = 0; r < m.z_count; ++r) {
    RequestOutcome& out = sol.requests[r];
    if (values[m.z(r)])
      out = RequestOutcome{};
    else if (out.direct_trip)
      out.status = ServiceStatus::Direct;
    else if (out.first_mile_trip)
      out.status = ServiceStatus::MultiModal;
  }
  sol.objective = objective_value(m, values);
  sol.values = std::move(values);
  return sol;
}

namespace {

using Clock = std::chrono::steady_clock;

// The model with every y replaced by the sum of its trip's x columns, leaving
// x and z as the only columns.
struct Reduced {
  std::size_t columns = 0;
  std::vector<double> cost;
  std::vector<lp::Row> rows;
};

Reduced reduce(const IlpModel& m) {
  Reduced red;
  red.columns = m.x_count + m.z_count;
  red.cost.resize(red.columns);
  for (std::size_t e = 0; e < m.x_count; ++e) red.cost[e] = m.variables[m.x(e)].cost;
  for (std::size_t r = 0; r < m.z_count; ++r) red.cost[m.x_count + r] = m.variables[m.z(r)].cost;

  std::vector<std::vector<std::size_t>> x_by_trip(m.trip_count);
  for (std::size_t e = 0; e < m.x_count; ++e) x_by_trip[m.x_trip[e]].push_back(e);

  for (const IlpRow& row : m.rows) {
    if (row.kind == ConstraintKind::TripServed) continue;
    std::map<std::size_t, double> terms;
    for (auto [j, a] : row.terms) {
      if (j < m.x_count) {
        terms[j] += a;
      } else if (j < m.x_count + m.y_count) {
        for (std::size_t e : x_by_trip[m.y_trip[j - m.x_count]]) terms[e] += a;
      } else {
        terms[j - m.y_count] += a;
      }
    }
    lp::Row out;
    out.sense = row.equality ? lp::Sense::Equal : lp::Sense::LessEqual;
    out.rhs = row.rhs;
    for (auto [j, a] : terms)
      if (a != 0.0) out.terms.emplace_back(j, a);
    if (out.terms.empty() && ((row.equality && row.rhs == 0.0) || (!row.equality && row.rhs >= 0.0)))
      continue;
    red.rows.push_back(std::move(out));
  }
  return red;
}

struct NodeLp {
  lp::Status status = lp::Status::Infeasible;
  double bound = 0.0;
  std::vector<double> x;  // reduced columns
  std::size_t iterations = 0;
};

NodeLp solve_node(const Reduced& red, const std::vector<std::pair<std::size_t, int>>& fixings) {
  NodeLp out;
  std::vector<int> fix(red.columns, -1);
  for (auto [j, v] : fixings) fix[j] = v;
  std::vector<std::size_t> map(red.columns, SIZE_MAX);
  lp::Problem p;
  double constant = 0.0;
  for (std::size_t j = 0; j < red.columns; ++j) {
    if (fix[j] < 0) {
      map[j] = p.columns++;
      p.cost.push_back(red.cost[j]);
    } else if (fix[j] == 1) {
      constant += red.cost[j];
    }
  }
  for (const lp::Row& row : red.rows) {
    lp::Row r;
    r.sense = row.sense;
    r.rhs = row.rhs;
    for (auto [j, a] : row.terms) {
      if (fix[j] < 0)
        r.terms.emplace_back(map[j], a);
      else if (fix[j] == 1)
        r.rhs -= a;
    }
    if (r.terms.empty()) {
      const bool ok = r.sense == lp::Sense::Equal ? std::abs(r.rhs) <= 1e-9 : r.rhs >= -1e-9;
      if (!ok) return out;
      continue;
    }
    p.rows.push_back(std::move(r));
  }
  const lp::Result res = lp::solve(p);
  out.status = res.status;
  out.iterations = res.iterations;
  if (res.status != lp::Status::Optimal) return out;
  out.bound = res.objective + constant;
  out.x.assign(red.columns, 0.0);
  for (std::size_t j = 0; j < red.columns; ++j)
    out.x[j] = fix[j] < 0 ? res.x[map[j]] : static_cast<double>(fix[j]);
  return out;
}

struct QueueNode {
  double bound;
  std::size_t depth;
  std::size_t seq;
  std::vector<std::pair<std::size_t, int>> fixings;
  std::vector<double> x;
};

struct Worse {
  bool operator()(const QueueNode& a, const QueueNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq < b.seq;
  }
};

constexpr double kIntTol = 1e-6;

}  // namespace

AssignmentSolution solve_ilp(const IlpModel& m, const SolveOptions& opts) {
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  const Reduced red = reduce(m);
  auto expand = [&](const std::vector<double>& x) {
    std::vector<std::uint8_t> values(m.variables.size(), 0);
    std::vector<std::uint8_t> trip_on(m.trip_count, 0);
    for (std::size_t e = 0; e < m.x_count; ++e)
      if (x[e] > 0.5) {
        values[m.x(e)] = 1;
        trip_on[m.x_trip[e]] = 1;
      }
    for (std::size_t e = 0; e < m.y_count; ++e) values[m.y(e)] = trip_on[m.y_trip[e]];
    for (std::size_t r = 0; r < m.z_count; ++r) values[m.z(r)] = x[m.x_count + r] > 0.5;
    return values;
  };

  std::vector<std::uint8_t> incumbent(m.variables.size(), 0);
  for (std::size_t r = 0; r < m.z_count; ++r) incumbent[m.z(r)] = 1;
  double best = objective_value(m, incumbent);
  bool found = false;
  bool exhausted = true;

  SolverStats stats;
  auto prune_level = [&] { return best - 1e-9 * std::max(1.0, std::abs(best)); };

  auto consider = [&](const NodeLp& node) -> bool {
    // True when the relaxation is integral (and the node is finished).
    for (double v : node.x)
      if (std::abs(v - std::round(v)) > kIntTol) return false;
    std::vector<double> rounded(node.x.size());
    for (std::size_t j = 0; j < node.x.size(); ++j) rounded[j] = std::round(node.x[j]);
    auto values = expand(rounded);
    const double obj = objective_value(m, values);
    if (obj < prune_level()) {
      best = obj;
      incumbent = std::move(values);
      found = true;
    }
    return true;
  };

  std::priority_queue<QueueNode, std::vector<QueueNode>, Worse> open;
  std::size_t seq = 0;
  auto evaluate = [&](std::vector<std::pair<std::size_t, int>> fixings, std::size_t depth) {
    NodeLp node = solve_node(red, fixings);
    ++stats.nodes;
    stats.lp_iterations += node.iterations;
    if (node.status == lp::Status::Infeasible) return;
    if (node.status != lp::Status::Optimal) {
      exhausted = false;
      return;
    }
    if (node.bound >= prune_level()) return;
    if (consider(node)) return;
    open.push({node.bound, depth, seq++, std::move(fixings), std::move(node.x)});
  };

  evaluate({}, 0);
  while (!open.empty()) {
    if (elapsed() > opts.time_limit || (opts.node_limit && stats.nodes >= opts.node_limit)) {
      exhausted = false;
      break;
    }
    QueueNode node = open.top();
    open.pop();
    if (node.bound >= prune_level()) continue;
    std::size_t branch = SIZE_MAX;
    double most = -1.0;
    for (std::size_t j = 0; j < node.x.size(); ++j) {
      const double frac = std::min(node.x[j] - std::floor(node.x[j]), std::ceil(node.x[j]) - node.x[j]);
      if (frac > kIntTol && frac > most + 1e-12) {
        most = frac;
        branch = j;
      }
    }
    for (int value : {0, 1}) {
      auto fixings = node.fixings;
      fixings.emplace_back(branch, value);
      evaluate(std::move(fixings), node.depth + 1);
    }
  }

  AssignmentSolution sol = decode(m, std::move(incumbent));
  stats.optimal = exhausted;
  stats.fallback = !found && !exhausted;
  stats.wall_seconds = elapsed();
  sol.stats = stats;
  return sol;
}

std::vector<Violation> validate_solution(const TirtvGraph& g, const AssignmentSolution& sol,
                                         const Router& router, const CapacityLedger* ledger) {
  std::vector<Violation> out;
  const std::size_t X = g.trip_vehicle.size(), Y = g.request_trip.size(), R = g.requests.size();
  if (sol.values.size() != X + Y + R) {
    out.push_back({ViolationKind::Shape, "expected " + std::to_string(X + Y + R) +
                                             " variables, got " + std::to_string(sol.values.size())});
    return out;
  }
  for (std::size_t j = 0; j < sol.values.size(); ++j)
    if (sol.values[j] > 1)
      out.push_back({ViolationKind::NotBinary, "variable " + std::to_string(j) + " is not 0/1"});
  auto x = [&](std::size_t e) { return static_cast<int>(sol.values[e]); };
  auto y = [&](std::size_t e) { return static_cast<int>(sol.values[X + e]); };
  auto z = [&](std::size_t r) { return static_cast<int>(sol.values[X + Y + r]); };

  std::vector<int> per_vehicle(g.vehicles.size(), 0);
  std::vector<int> per_trip(g.trips.size(), 0);
  for (std::size_t e = 0; e < X; ++e) {
    const auto& edge = g.trip_vehicle[e];
    per_trip[edge.trip] += x(e);
    if (!edge.dummy()) per_vehicle[edge.vehicle] += x(e);
  }
  for (std::size_t v = 0; v < per_vehicle.size(); ++v)
    if (per_vehicle[v] > 1)
      out.push_back({ViolationKind::VehicleOnce, "vehicle " + std::to_string(g.vehicles[v].id) +
                                                     " is assigned " +
                                                     std::to_string(per_vehicle[v]) + " trips"});

  std::vector<int> options(R, 0);
  std::vector<std::map<TransitLeg, int>> balance(R);
  std::vector<std::optional<TransitLeg>> chosen_leg(R);
  for (std::size_t e = 0; e < Y; ++e) {
    const auto& edge = g.request_trip[e];
    const Roles roles = roles_of(g, edge.request, edge.trip);
    if (roles.first) {
      options[edge.request] += y(e);
      balance[edge.request][*roles.first] += y(e);
      if (y(e) && !chosen_leg[edge.request]) chosen_leg[edge.request] = roles.first;
    }
    if (roles.direct) options[edge.request] += y(e);
    if (roles.last) balance[edge.request][*roles.last] -= y(e);
    if (per_trip[edge.trip] != y(e))
      out.push_back({ViolationKind::TripServed,
                     "trip " + std::to_string(edge.trip) + " has " +
                         std::to_string(per_trip[edge.trip]) + " vehicles but request " +
                         std::to_string(g.requests[edge.request].id) + " selects it " +
                         std::to_string(y(e)) + " times"});
  }
  for (std::size_t r = 0; r < R; ++r) {
    if (options[r] + z(r) != 1)
      out.push_back({ViolationKind::SingleOption, "request " + std::to_string(g.requests[r].id) +
                                                      " has " + std::to_string(options[r] + z(r)) +
                                                      " options selected"});
    for (const auto& [leg, diff] : balance[r])
      if (diff != 0)
        out.push_back({ViolationKind::MileConsistency,
                       "request " + std::to_string(g.requests[r].id) +
                           " first and last mile disagree on line " + std::to_string(leg.line) +
                           " run " + std::to_string(leg.run)});
  }

  // Route replay.
  struct Expected {
    NodeId node;
    Seconds earliest;
    Seconds latest;
    bool has_pickup;
  };
  for (std::size_t e = 0; e < X; ++e) {
    const auto& edge = g.trip_vehicle[e];
    if (!x(e) || edge.dummy()) continue;
    const VehicleState& v = g.vehicles[edge.vehicle];
    auto fail = [&](const std::string& why) {
      out.push_back({ViolationKind::Route, "vehicle " + std::to_string(v.id) + " trip " +
                                               std::to_string(edge.trip) + ": " + why});
    };
    if (!edge.route.feasible) {
      fail("route is marked infeasible");
      continue;
    }
    using Key = std::tuple<int, RequestId, int>;
    std::map<Key, Expected> expected;
    auto key = [](EventType t, RequestId r, SegmentKind k) {
      return Key{static_cast<int>(t), r, static_cast<int>(k)};
    };
    for (const auto& p : v.onboard)
      expected[key(EventType::Dropoff, p.request, p.kind)] = {p.dropoff, 0.0, p.deadline, false};
    auto add = [&](const TravelSegment& s) {
      expected[key(EventType::Pickup, s.request, s.kind)] = {s.pickup, s.pickup_earliest,
                                                            s.pickup_latest, false};
      expected[key(EventType::Dropoff, s.request, s.kind)] = {s.dropoff, 0.0, s.dropoff_deadline,
                                                             true};
    };
    for (const auto& s : v.pending) add(s);
    for (std::size_t s : g.trips[edge.trip].segments) add(g.segments[s]);

    if (edge.route.events.size() != expected.size()) {
      fail("route has " + std::to_string(edge.route.events.size()) + " events, expected " +
           std::to_string(expected.size()));
      continue;
    }
    std::set<Key> seen;
    NodeId at = v.location;
    Seconds clock = std::max(g.now, v.available_time);
    int load = static_cast<int>(v.onboard.size());
    for (const RouteEvent& ev : edge.route.events) {
      const Key k = key(ev.type, ev.request, ev.kind);
      auto it = expected.find(k);
      if (it == expected.end() || !seen.insert(k).second) {
        fail("unexpected event for request " + std::to_string(ev.request));
        break;
      }
      const Expected& want = it->second;
      if (ev.node != want.node) {
        fail("event for request " + std::to_string(ev.request) + " at the wrong node");
        break;
      }
      if (ev.type == EventType::Dropoff && want.has_pickup &&
          !seen.contains(key(EventType::Pickup, ev.request, ev.kind))) {
        fail("dropoff before pickup for request " + std::to_string(ev.request));
        break;
      }
      const auto c = router.cost(at, ev.node);
      if (!c) {
        fail("no path to node " + std::to_string(ev.node));
        break;
      }
      clock += c->time;
      if (ev.type == EventType::Pickup) clock = std::max(clock, want.earliest);
      if (clock > want.latest + 1e-9) {
        fail("request " + std::to_string(ev.request) + " served late");
        break;
      }
      if (std::abs(clock - ev.time) > 1e-6) {
        fail("planned time does not match replay for request " + std::to_string(ev.request));
        break;
      }
      load += ev.type == EventType::Pickup ? 1 : -1;
      if (load > v.capacity) {
        fail("capacity exceeded");
        break;
      }
      at = ev.node;
    }
  }

  if (ledger) {
    CapacityLedger book = *ledger;
    for (std::size_t r = 0; r < R; ++r) {
      if (!chosen_leg[r]) continue;
      try {
        book.reserve(*chosen_leg[r]);
      } catch (const CapacityError& e) {
        out.push_back({ViolationKind::BusCapacity,
                       "request " + std::to_string(g.requests[r].id) + ": " + e.what()});
      }
    }
  }
  return out;
}

}  // namespace tirs
