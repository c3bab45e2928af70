#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "tirs/errors.hpp"
#include "tirs/scenario.hpp"
#include "tirs/simcore.hpp"

namespace py = pybind11;
using namespace tirs;

namespace {

py::dict metrics_dict(const MetricsReport& m) {
  py::dict d;
  d["requests"] = m.requests;
  d["transit_only"] = m.transit_only;
  d["direct"] = m.direct;
  d["multimodal"] = m.multimodal;
  d["unserved"] = m.unserved;
  d["service_rate"] = m.service_rate;
  d["service_rate_undefined"] = m.service_rate_undefined;
  d["rideshare_service_rate"] = m.rideshare_service_rate;
  d["direct_share"] = m.direct_share;
  d["multimodal_share"] = m.multimodal_share;
  d["first_mile_only"] = m.first_mile_only;
  d["last_mile_only"] = m.last_mile_only;
  d["both_miles"] = m.both_miles;
  d["fleet_vmt_km"] = m.fleet_vmt_km;
  d["total_vmt_km"] = m.total_vmt_km;
  d["bus_violations"] = m.bus_violations;
  d["deadline_violations"] = m.deadline_violations;
  d["batches"] = m.batches;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Transit-integrated ride-sharing batch simulator";
  m.attr("__version__") = TIRS_VERSION;

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);

  py::class_<Point>(m, "Point")
      .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
      .def_readwrite("x", &Point::x)
      .def_readwrite("y", &Point::y);

  py::class_<RoadGraph>(m, "RoadGraph")
      .def(py::init<>())
      .def("add_node", &RoadGraph::add_node, py::arg("id"), py::arg("where"))
      .def("add_edge", &RoadGraph::add_edge, py::arg("source"), py::arg("target"),
           py::arg("travel_time"), py::arg("distance"))
      .def_property_readonly("node_count", &RoadGraph::node_count)
      .def_property_readonly("edge_count", &RoadGraph::edge_count)
      .def("node_ids", [](const RoadGraph& g) {
        auto ids = g.node_ids();
        return std::vector<NodeId>(ids.begin(), ids.end());
      })
      .def("position", &RoadGraph::position)
      .def("__contains__", &RoadGraph::contains);

  m.def("load_graph", &load_graph, py::arg("path"));
  m.def("write_graph", &write_graph, py::arg("graph"), py::arg("path"));
  m.def(
      "shortest_path",
      [](const RoadGraph& g, NodeId s, NodeId t) -> py::object {
        const auto p = shortest_path(g, s, t);
        if (!p) return py::none();
        return py::make_tuple(p->travel_time, p->distance, p->node_sequence);
      },
      py::arg("graph"), py::arg("source"), py::arg("target"),
      "(travel_time, distance, nodes) of the fastest path, or None");

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("rows", &GridSpec::rows)
      .def_readwrite("cols", &GridSpec::cols)
      .def_readwrite("spacing", &GridSpec::spacing)
      .def_readwrite("edge_time", &GridSpec::edge_time);
  py::class_<CorridorSpec>(m, "CorridorSpec")
      .def(py::init<>())
      .def_readwrite("row", &CorridorSpec::row)
      .def_readwrite("col", &CorridorSpec::col)
      .def_readwrite("stop_every", &CorridorSpec::stop_every)
      .def_readwrite("dwell", &CorridorSpec::dwell)
      .def_readwrite("first_departure", &CorridorSpec::first_departure)
      .def_readwrite("last_departure", &CorridorSpec::last_departure)
      .def_readwrite("headway", &CorridorSpec::headway)
      .def_readwrite("capacity", &CorridorSpec::capacity);
  m.def("make_grid", &make_grid, py::arg("spec") = GridSpec{});
  m.def("make_corridors", &make_corridors, py::arg("grid"), py::arg("spec"));

  py::class_<TransitSchedule>(m, "TransitSchedule")
      .def(py::init<>())
      .def_property_readonly("stop_count", [](const TransitSchedule& s) { return s.stops.size(); })
      .def_property_readonly("line_count", [](const TransitSchedule& s) { return s.lines.size(); })
      .def_property_readonly("run_count", &TransitSchedule::run_count)
      .def_property_readonly("leg_count", [](const TransitSchedule& s) { return unpruned_leg_count(s); });
  m.def("load_schedule", &load_schedule, py::arg("directory"), py::arg("graph"),
        py::arg("snap_radius") = 500.0);
  m.def("write_schedule", &write_schedule, py::arg("schedule"), py::arg("directory"));

  py::class_<QosParams>(m, "QosParams")
      .def(py::init<>())
      .def_readwrite("alpha", &QosParams::alpha)
      .def_readwrite("beta", &QosParams::beta);
  py::class_<Request>(m, "Request")
      .def_readonly("id", &Request::id)
      .def_readonly("origin", &Request::origin)
      .def_readonly("destination", &Request::destination)
      .def_readonly("request_time", &Request::request_time)
      .def_readonly("sptt", &Request::sptt)
      .def_readonly("direct_distance", &Request::direct_distance)
      .def_readonly("deadline", &Request::deadline);
  py::class_<DemandConfig>(m, "DemandConfig")
      .def(py::init<>())
      .def_readwrite("count", &DemandConfig::count)
      .def_readwrite("min_trip_distance", &DemandConfig::min_trip_distance)
      .def_readwrite("qos", &DemandConfig::qos)
      .def_readwrite("seed", &DemandConfig::seed)
      .def_property(
          "morning", [](const DemandConfig& c) { return py::make_tuple(c.morning.start, c.morning.end); },
          [](DemandConfig& c, std::pair<double, double> w) { c.morning = {w.first, w.second}; })
      .def_property(
          "evening", [](const DemandConfig& c) { return py::make_tuple(c.evening.start, c.evening.end); },
          [](DemandConfig& c, std::pair<double, double> w) { c.evening = {w.first, w.second}; });
  m.def(
      "generate_demand",
      [](const DemandConfig& cfg, const RoadGraph& g) {
        Router router(g);
        return generate_demand(cfg, router);
      },
      py::arg("config"), py::arg("graph"));
  m.def(
      "load_requests",
      [](const std::filesystem::path& p, const RoadGraph& g, const QosParams& qos) {
        Router router(g);
        return load_requests(p, router, qos);
      },
      py::arg("path"), py::arg("graph"), py::arg("qos") = QosParams{});
  m.def(
      "write_requests",
      [](const std::vector<Request>& r, const std::filesystem::path& p) { write_requests(r, p); },
      py::arg("requests"), py::arg("path"));

  py::enum_<Mode>(m, "Mode")
      .value("INTEGRATED", Mode::Integrated)
      .value("RIDESHARE_ONLY", Mode::RideshareOnly)
      .value("MULTIMODAL_ONLY", Mode::MultiModalOnly);
  m.def("parse_mode", &parse_mode);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("batch_window", &SimConfig::batch_window)
      .def_readwrite("batch_cap", &SimConfig::batch_cap)
      .def_readwrite("fleet_size", &SimConfig::fleet_size)
      .def_readwrite("vehicle_capacity", &SimConfig::vehicle_capacity)
      .def_readwrite("mode", &SimConfig::mode)
      .def_readwrite("qos", &SimConfig::qos)
      .def_property(
          "walk_speed", [](const SimConfig& c) { return c.walk.speed; },
          [](SimConfig& c, double v) { c.walk.speed = v; })
      .def_property(
          "max_walk", [](const SimConfig& c) { return c.walk.max_walk; },
          [](SimConfig& c, double v) { c.walk.max_walk = v; })
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("penalty_factor", &SimConfig::penalty_factor)
      .def_readwrite("fixed_penalty", &SimConfig::fixed_penalty)
      .def_readwrite("max_trip_size", &SimConfig::max_trip_size)
      .def_readwrite("single_request_trips", &SimConfig::single_request_trips)
      .def_readwrite("solver_time_limit", &SimConfig::solver_time_limit)
      .def_readwrite("threads", &SimConfig::threads)
      .def_readwrite("check_dominance", &SimConfig::check_dominance)
      .def("validate", &SimConfig::validate);

  m.def("fleet_for_ratio", &fleet_for_ratio, py::arg("per_thousand"), py::arg("requests"));
  m.def(
      "simulate",
      [](const SimConfig& cfg, const RoadGraph& g, const TransitSchedule& s,
         std::vector<Request> requests) {
        SimResult res;
        {
          py::gil_scoped_release release;
          res = run(cfg, g, s, std::move(requests));
        }
        std::ostringstream events;
        write_event_log(events, res.log);
        py::list objectives;
        for (const auto& b : res.batches) objectives.append(b.objective);
        py::dict out;
        out["metrics"] = metrics_dict(res.metrics);
        out["events"] = events.str();
        out["batch_objectives"] = objectives;
        out["csv_row"] = metrics_csv_row(cfg, res.metrics);
        return out;
      },
      py::arg("config"), py::arg("graph"), py::arg("schedule"), py::arg("requests"),
      "Runs a whole simulation; returns metrics, the JSONL event log and per-batch objectives.");
  m.def("metrics_csv_header", &metrics_csv_header);
  m.def(
      "transit_reach",
      [](const TransitSchedule& s, const RoadGraph& g, const std::vector<Request>& requests,
         const std::vector<double>& distances, double walk_speed) {
        Router router(g);
        return transit_reach(s, router, requests, distances, walk_speed);
      },
      py::arg("schedule"), py::arg("graph"), py::arg("requests"), py::arg("distances"),
      py::arg("walk_speed") = 1.4);
}
