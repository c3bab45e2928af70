#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tirs/tirtv.hpp"

namespace tirs {

enum class VarKind { TripVehicle, RequestTrip, Reject };

struct IlpVariable {
  VarKind kind = VarKind::Reject;
  std::size_t ref = 0;  // E2 edge, E1 edge or request index
  double cost = 0.0;
};

enum class ConstraintKind { VehicleOnce, SingleOption, MileConsistency, TripServed };

const char* to_string(ConstraintKind kind);

struct IlpRow {
  ConstraintKind kind = ConstraintKind::SingleOption;
  std::vector<std::pair<std::size_t, double>> terms;
  bool equality = true;  // otherwise <=
  double rhs = 0.0;
  std::size_t owner = 0;           // vehicle, request or E1 edge index
  std::optional<TransitLeg> leg;   // mile-consistency rows
};

// Variables are laid out x (one per E2 edge, in edge order), then y (one per
// E1 edge), then z (one per request).
struct IlpModel {
  std::vector<IlpVariable> variables;
  std::vector<IlpRow> rows;
  std::vector<double> penalties;
  std::size_t x_count = 0, y_count = 0, z_count = 0;

  // Per request: trips holding its first mile, last mile, direct segment.
  std::vector<std::vector<std::size_t>> first_mile_trips, last_mile_trips, direct_trips;

  // Decoding data.
  std::vector<std::size_t> x_trip;          // per x: trip index
  std::vector<std::size_t> x_vehicle;       // per x: vehicle index or kDummyVehicle
  std::vector<std::size_t> y_request, y_trip;
  std::vector<std::optional<TransitLeg>> y_first_leg, y_last_leg;
  std::vector<char> y_direct;
  std::size_t trip_count = 0;

  std::size_t x(std::size_t e2) const { return e2; }
  std::size_t y(std::size_t e1) const { return x_count + e1; }
  std::size_t z(std::size_t r) const { return x_count + y_count + r; }
};

// 10 * (largest trip-vehicle cost in the graph + the request's direct
// distance, or its shortest travel time under the time metric).
std::vector<double> default_penalties(const TirtvGraph& g, CostMetric metric = CostMetric::Distance,
                                      double factor = 10.0);

IlpModel build_ilp(const TirtvGraph& g, std::span<const double> penalties);

// CPLEX LP text.
std::string to_lp_format(const IlpModel& m);

enum class ServiceStatus { Direct, MultiModal, Rejected };

const char* to_string(ServiceStatus s);

struct RequestOutcome {
  ServiceStatus status = ServiceStatus::Rejected;
  std::optional<TransitLeg> leg;
  std::optional<std::size_t> direct_trip, first_mile_trip, last_mile_trip;
};

struct SolverStats {
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double wall_seconds = 0.0;
  bool optimal = false;
  bool fallback = false;  // no incumbent was found in time; everything rejected
};

struct AssignmentSolution {
  std::vector<std::uint8_t> values;  // per model variable
  std::vector<std::size_t> chosen;   // E2 edges with x = 1, ascending
  std::vector<RequestOutcome> requests;
  double objective = 0.0;
  SolverStats stats;
};

struct SolveOptions {
  double time_limit = 60.0;  // seconds
  std::size_t node_limit = 0;  // 0: unlimited
};

// Best-first branch and bound over the LP relaxation. Ties in the bound are
// explored deepest-first; branching takes the most fractional variable, the
// lowest index winning ties. The objective is summed in ascending order of
// the chosen coefficients.
AssignmentSolution solve_ilp(const IlpModel& m, const SolveOptions& opts = {});
inline AssignmentSolution solve_ilp(const IlpModel& m, double time_limit) {
  return solve_ilp(m, SolveOptions{time_limit});
}

// Canonical objective of a 0/1 assignment.
double objective_value(const IlpModel& m, std::span<const std::uint8_t> values);

// Decodes request outcomes and chosen edges from variable values.
AssignmentSolution decode(const IlpModel& m, std::vector<std::uint8_t> values);

enum class ViolationKind {
  Shape,
  NotBinary,
  VehicleOnce,
  SingleOption,
  MileConsistency,
  TripServed,
  Route,
  BusCapacity,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind = ViolationKind::Shape;
  std::string message;
};

// Replays every modeled constraint against the graph (values use the model's
// x, y, z layout), re-times each chosen vehicle route and, when a ledger is
// given, books every multi-modal outcome's leg on a copy of it.
std::vector<Violation> validate_solution(const TirtvGraph& g, const AssignmentSolution& sol,
                                         const Router& router,
                                         const CapacityLedger* ledger = nullptr);

}  // namespace tirs
