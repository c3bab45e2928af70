#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "tirs/csv.hpp"
#include "tirs/demand.hpp"
#include "tirs/errors.hpp"
#include "tirs/netgraph.hpp"
#include "tirs/scenario.hpp"
#include "tirs/simcore.hpp"
#include "tirs/transit.hpp"

namespace fs = std::filesystem;
using namespace tirs;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kRuntime = 3 };

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

nlohmann::ordered_json hash_inputs(const std::vector<fs::path>& paths) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file()) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) out[f.string()] = sha256_file(f);
    } else {
      out[p.string()] = sha256_file(p);
    }
  }
  return out;
}

nlohmann::ordered_json config_json(const SimConfig& c) {
  return {{"batch_window_s", c.batch_window},
          {"batch_cap", c.batch_cap},
          {"fleet_size", c.fleet_size},
          {"vehicle_capacity", c.vehicle_capacity},
          {"mode", to_string(c.mode)},
          {"alpha", c.qos.alpha},
          {"beta_s", c.qos.beta},
          {"walk_speed", c.walk.speed},
          {"max_walk_m", c.walk.max_walk},
          {"seed", c.seed},
          {"penalty_factor", c.penalty_factor},
          {"fixed_penalty", c.fixed_penalty ? nlohmann::ordered_json(*c.fixed_penalty) : nullptr},
          {"cost_metric", c.metric == CostMetric::Distance ? "distance" : "time"},
          {"max_trip_size", c.max_trip_size},
          {"single_request_trips", c.single_request_trips},
          {"max_route_events", c.max_route_events},
          {"solver_time_limit_s", c.solver_time_limit},
          {"threads", c.threads},
          {"check_dominance", c.check_dominance}};
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write '" + p.string() + "'");
  return out;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "'" + item + "' is not a number");
    }
  }
  if (out.empty()) throw CLI::ValidationError(what, "empty list");
  return out;
}

struct SimArgs {
  std::string graph, transit, requests, out = "out";
  SimConfig cfg;
  std::string mode = "integrated";
  std::string metric = "distance";
  std::vector<std::string> sweeps;
  double snap = 500.0;
};

int cmd_simulate(const SimArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const RoadGraph g = load_graph(a.graph);
  const TransitSchedule schedule = load_schedule(a.transit, g, a.snap);
  Router router(g);
  const auto requests = load_requests(a.requests, router, a.cfg.qos);

  SimConfig base = a.cfg;
  base.mode = parse_mode(a.mode);
  if (a.metric == "distance")
    base.metric = CostMetric::Distance;
  else if (a.metric == "time")
    base.metric = CostMetric::Time;
  else
    throw CLI::ValidationError("--metric", "expected distance or time");

  // Fleet ratios apply to the requests left after walk-only transit trips.
  const std::size_t walk_only = transit_only_count(schedule, router, requests, base.walk);
  const std::size_t sized_on = requests.size() - walk_only;
  std::vector<std::size_t> fleets{base.fleet_size};
  std::vector<int> capacities{base.vehicle_capacity};
  std::vector<Mode> modes{base.mode};
  bool sweeping = false;
  for (const auto& s : a.sweeps) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--sweep", "expected key=v1,v2,...");
    const std::string key = s.substr(0, eq), values = s.substr(eq + 1);
    sweeping = true;
    if (key == "fleet") {
      fleets.clear();
      for (double r : parse_list(values, "--sweep fleet"))
        fleets.push_back(fleet_for_ratio(r, sized_on));
    } else if (key == "capacity") {
      capacities.clear();
      for (double c : parse_list(values, "--sweep capacity")) capacities.push_back(static_cast<int>(c));
    } else if (key == "mode") {
      modes.clear();
      std::stringstream ss(values);
      std::string m;
      while (std::getline(ss, m, ',')) modes.push_back(parse_mode(m));
    } else {
      throw CLI::ValidationError("--sweep", "unknown key '" + key + "' (fleet, capacity, mode)");
    }
  }

  const fs::path out(a.out);
  fs::create_directories(out);
  std::ofstream csv = open_out(out / "metrics.csv");
  csv << metrics_csv_header() << '\n';
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (Mode mode : modes)
    for (int cap : capacities)
      for (std::size_t fleet : fleets) {
        SimConfig cfg = base;
        cfg.mode = mode;
        cfg.vehicle_capacity = cap;
        cfg.fleet_size = fleet;
        const auto r0 = std::chrono::steady_clock::now();
        const SimResult res = run(cfg, g, schedule, requests);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - r0).count();
        csv << metrics_csv_row(cfg, res.metrics) << '\n';

        std::string stem = "events";
        if (sweeping)
          stem += "-" + std::string(to_string(mode)) + "-c" + std::to_string(cap) + "-f" +
                  std::to_string(fleet);
        std::ofstream ev = open_out(out / (stem + ".jsonl"));
        write_event_log(ev, res.log);

        std::ostringstream js;
        write_metrics_json(js, res.metrics);
        nlohmann::ordered_json rep = nlohmann::ordered_json::parse(js.str());
        rep["fleet_size"] = fleet;
        rep["vehicle_capacity"] = cap;
        rep["mode"] = to_string(mode);
        reports.push_back(rep);
        runs.push_back({{"fleet_size", fleet},
                        {"vehicle_capacity", cap},
                        {"mode", to_string(mode)},
                        {"wall_seconds", wall},
                        {"mean_batch_seconds", res.metrics.mean_batch_seconds},
                        {"max_batch_seconds", res.metrics.max_batch_seconds},
                        {"events", stem + ".jsonl"}});
        std::cerr << "fleet " << fleet << " capacity " << cap << " " << to_string(mode)
                  << ": service rate " << res.metrics.service_rate << "\n";
      }
  {
    std::ofstream mj = open_out(out / "metrics.json");
    mj << (reports.size() == 1 ? reports[0] : reports).dump(2) << '\n';
  }
  nlohmann::ordered_json manifest;
  manifest["version"] = TIRS_VERSION;
  manifest["seed"] = base.seed;
  manifest["config"] = config_json(base);
  manifest["sweeps"] = a.sweeps;
  manifest["requests"] = requests.size();
  manifest["walk_only_transit_requests"] = walk_only;
  manifest["walking_distance"] = "network";
  manifest["inputs"] = hash_inputs({a.graph, a.transit, a.requests});
  manifest["runs"] = runs;
  manifest["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream mf = open_out(out / "manifest.json");
  mf << manifest.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transit-integrated ride-sharing batch simulator"};
  app.set_version_flag("--version", std::string(TIRS_VERSION));
  app.set_config("--config", "", "INI/TOML file with option values (flags override it)");
  app.require_subcommand(1);

  SimArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the batch simulation and write reports");
  simulate->add_option("--graph", sim.graph, "Road graph CSV")->required()->check(CLI::ExistingFile);
  simulate->add_option("--transit", sim.transit, "GTFS directory")->required();
  simulate->add_option("--requests", sim.requests, "Requests CSV")->required();
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();
  simulate->add_option("--fleet", sim.cfg.fleet_size, "Fleet size")->capture_default_str();
  simulate->add_option("--capacity", sim.cfg.vehicle_capacity, "Seats per vehicle")
      ->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--mode", sim.mode, "integrated, rideshare or multimodal")
      ->capture_default_str();
  simulate->add_option("--batch-window", sim.cfg.batch_window, "Seconds per batch")
      ->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--batch-cap", sim.cfg.batch_cap, "Requests per batch")
      ->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--alpha", sim.cfg.qos.alpha, "Detour factor")->capture_default_str();
  simulate->add_option("--beta", sim.cfg.qos.beta, "Extra travel time (s)")->capture_default_str();
  simulate->add_option("--walk-speed", sim.cfg.walk.speed, "m/s")->capture_default_str();
  simulate->add_option("--max-walk", sim.cfg.walk.max_walk, "Meters")->capture_default_str();
  simulate->add_option("--seed", sim.cfg.seed, "Vehicle placement seed")->capture_default_str();
  simulate->add_option("--penalty-factor", sim.cfg.penalty_factor, "Rejection penalty factor")
      ->capture_default_str();
  simulate->add_option("--metric", sim.metric, "Assignment cost: distance or time")
      ->capture_default_str();
  simulate->add_option("--max-trip-size", sim.cfg.max_trip_size, "Segments per trip")
      ->capture_default_str();
  simulate->add_option("--max-route-events", sim.cfg.max_route_events,
                       "Route events a vehicle may hold (PDP search bound)")
      ->capture_default_str();
  simulate->add_option("--fixed-penalty", sim.cfg.fixed_penalty,
                       "Rejection penalty for every request (overrides --penalty-factor)");
  simulate->add_flag("!--shared-trips", sim.cfg.single_request_trips,
                     "Let one vehicle take segments of several new requests per batch");
  simulate->add_option("--time-limit", sim.cfg.solver_time_limit, "Solver seconds per batch")
      ->capture_default_str();
  simulate->add_option("--threads", sim.cfg.threads, "Graph-building workers (0 = all cores)")
      ->capture_default_str();
  simulate->add_option("--snap", sim.snap, "Stop snapping radius (m)")->capture_default_str();
  simulate->add_flag("--check-dominance", sim.cfg.check_dominance,
                     "Also solve every batch without multi-modal options");
  simulate->add_option("--sweep", sim.sweeps,
                       "key=v1,v2,... with key fleet (per 1000 requests), capacity or mode");

  std::string dg_graph, dg_out;
  DemandConfig dc;
  auto* gen = app.add_subcommand("gen-demand", "Generate a synthetic requests CSV");
  gen->add_option("--graph", dg_graph, "Road graph CSV")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", dg_out, "Requests CSV to write")->required();
  gen->add_option("--count", dc.count, "Number of requests")->capture_default_str();
  gen->add_option("--seed", dc.seed, "Random seed")->capture_default_str();
  gen->add_option("--min-distance", dc.min_trip_distance, "Minimum trip length (m)")
      ->capture_default_str();

  std::string tr_graph, tr_transit, tr_requests, tr_out, tr_dist = "100,200,400,800";
  double tr_speed = 1.4, tr_snap = 500.0;
  auto* reach = app.add_subcommand("transit-reach", "Share of trips doable by walking and transit");
  reach->add_option("--graph", tr_graph, "Road graph CSV")->required()->check(CLI::ExistingFile);
  reach->add_option("--transit", tr_transit, "GTFS directory")->required();
  reach->add_option("--requests", tr_requests, "Requests CSV")->required();
  reach->add_option("--out", tr_out, "CSV to write (stdout when omitted)");
  reach->add_option("--distances", tr_dist, "Walking limits in meters")->capture_default_str();
  reach->add_option("--walk-speed", tr_speed, "m/s")->capture_default_str();
  reach->add_option("--snap", tr_snap, "Stop snapping radius (m)")->capture_default_str();

  std::string vd_graph, vd_transit, vd_requests;
  auto* validate_cmd = app.add_subcommand("validate-data", "Load and check input files");
  validate_cmd->add_option("--graph", vd_graph, "Road graph CSV")->required();
  validate_cmd->add_option("--transit", vd_transit, "GTFS directory");
  validate_cmd->add_option("--requests", vd_requests, "Requests CSV");

  std::string gc_out = "city";
  GridSpec grid;
  CorridorSpec corridor;
  auto* city = app.add_subcommand("gen-city", "Write a grid city with two crossing bus corridors");
  city->add_option("--out", gc_out, "Directory for graph.csv and gtfs/")->capture_default_str();
  city->add_option("--rows", grid.rows)->capture_default_str();
  city->add_option("--cols", grid.cols)->capture_default_str();
  city->add_option("--spacing", grid.spacing, "Meters")->capture_default_str();
  city->add_option("--edge-time", grid.edge_time, "Seconds per block")->capture_default_str();
  city->add_option("--headway", corridor.headway, "Seconds")->capture_default_str();
  city->add_option("--bus-capacity", corridor.capacity)->capture_default_str();
  std::optional<std::size_t> corridor_row, corridor_col;
  city->add_option("--corridor-row", corridor_row, "Grid row of the east-west line (default: middle)");
  city->add_option("--corridor-col", corridor_col, "Grid column of the north-south line (default: middle)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*gen) {
      const RoadGraph g = load_graph(dg_graph);
      Router router(g);
      write_requests(generate_demand(dc, router), dg_out);
      return kOk;
    }
    if (*reach) {
      const RoadGraph g = load_graph(tr_graph);
      const TransitSchedule s = load_schedule(tr_transit, g, tr_snap);
      Router router(g);
      const auto requests = load_requests(tr_requests, router, QosParams{});
      if (requests.empty()) throw DataError("'" + tr_requests + "' contains no requests");
      const auto dist = parse_list(tr_dist, "--distances");
      const auto table = transit_reach(s, router, requests, dist, tr_speed);
      std::ostringstream os;
      os << "distance_m,fraction\n";
      for (auto [d, f] : table) os << csv::format_double(d) << ',' << csv::format_double(f) << '\n';
      if (tr_out.empty()) {
        std::cout << os.str();
      } else {
        auto out = open_out(tr_out);
        out << os.str();
      }
      return kOk;
    }
    if (*validate_cmd) {
      const RoadGraph g = load_graph(vd_graph);
      std::cout << "graph: " << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
      if (!vd_transit.empty()) {
        const TransitSchedule s = load_schedule(vd_transit, g);
        std::cout << "transit: " << s.stops.size() << " stops, " << s.lines.size() << " lines, "
                  << s.run_count() << " runs, " << unpruned_leg_count(s) << " legs\n";
      }
      if (!vd_requests.empty()) {
        Router router(g);
        std::cout << "requests: " << load_requests(vd_requests, router, QosParams{}).size() << "\n";
      }
      return kOk;
    }
    if (*city) {
      const fs::path out(gc_out);
      corridor.row = corridor_row.value_or(grid.rows / 2);
      corridor.col = corridor_col.value_or(grid.cols / 2);
      fs::create_directories(out);
      write_graph(make_grid(grid), out / "graph.csv");
      write_schedule(make_corridors(grid, corridor), out / "gtfs");
      return kOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const GenerationError& e) {
    std::cerr << "generation error: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
