#include <array>
#include <cstdio>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "tirs/csv.hpp"

namespace {

struct Outcome {
  int status = -1;
  std::string output;  // stdout and stderr together
};

Outcome tirs_cli(const std::string& args) {
  const std::string cmd = std::string(TIRS_BIN) + " " + args + " 2>&1";
  Outcome out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.output.append(buf.data(), n);
  const int raw = pclose(pipe);
  out.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// A small city plus 40 requests, shared by the cases below.
struct Workspace {
  testing::TempDir dir;
  std::string graph, gtfs, requests;
  Workspace() {
    const auto city = dir / "city";
    REQUIRE(tirs_cli("gen-city --out " + city.string() + " --rows 5 --cols 6 --spacing 400 --edge-time 40")
                .status == 0);
    graph = (city / "graph.csv").string();
    gtfs = (city / "gtfs").string();
    requests = (dir / "requests.csv").string();
    REQUIRE(tirs_cli("gen-demand --graph " + graph + " --out " + requests +
                     " --count 40 --seed 3 --min-distance 800")
                .status == 0);
  }
};

}  // namespace

TEST_CASE("simulate writes the four reports") {
  Workspace w;
  const auto out = w.dir / "run";
  const auto res = tirs_cli("simulate --graph " + w.graph + " --transit " + w.gtfs + " --requests " +
                            w.requests + " --fleet 3 --out " + out.string());
  REQUIRE_MESSAGE(res.status == 0, res.output);
  for (const char* f : {"metrics.csv", "metrics.json", "events.jsonl", "manifest.json"})
    CHECK_MESSAGE(std::filesystem::exists(out / f), f);
  const auto manifest = nlohmann::json::parse(testing::read_text(out / "manifest.json"));
  CHECK(manifest["requests"] == 40);
  CHECK(manifest["inputs"].size() >= 3);
  CHECK(manifest["config"]["fleet_size"] == 3);
  const auto metrics = nlohmann::json::parse(testing::read_text(out / "metrics.json"));
  CHECK(metrics["requests"] == 40);
  CHECK(line_count(testing::read_text(out / "metrics.csv")) == 2);
}

TEST_CASE("simulate sweeps are cartesian and repeatable") {
  Workspace w;
  const std::string common = "simulate --graph " + w.graph + " --transit " + w.gtfs + " --requests " +
                             w.requests + " --sweep fleet=50,100 --sweep capacity=1,4 --out ";
  const auto a = w.dir / "a", b = w.dir / "b";
  REQUIRE(tirs_cli(common + a.string()).status == 0);
  REQUIRE(tirs_cli(common + b.string()).status == 0);
  const auto csv_a = testing::read_text(a / "metrics.csv");
  CHECK(line_count(csv_a) == 5);
  CHECK(csv_a == testing::read_text(b / "metrics.csv"));
}

TEST_CASE("simulate input errors") {
  Workspace w;
  const auto missing = (w.dir / "no-such-gtfs").string();
  auto res = tirs_cli("simulate --graph " + w.graph + " --transit " + missing + " --requests " + w.requests +
                      " --out " + (w.dir / "x").string());
  CHECK(res.status != 0);
  CHECK(res.output.find(missing) != std::string::npos);

  res = tirs_cli("simulate --graph " + w.graph + " --transit " + w.gtfs + " --requests " + w.requests +
                 " --mode bus --out " + (w.dir / "y").string());
  CHECK(res.status != 0);
  res = tirs_cli("simulate --graph " + w.graph + " --transit " + w.gtfs + " --requests " + w.requests +
                 " --sweep speed=1 --out " + (w.dir / "z").string());
  CHECK(res.status != 0);
  CHECK(tirs_cli("simulate").status != 0);
}

TEST_CASE("gen-demand") {
  Workspace w;
  const auto again = (w.dir / "again.csv").string();
  REQUIRE(tirs_cli("gen-demand --graph " + w.graph + " --out " + again +
                   " --count 40 --seed 3 --min-distance 800")
              .status == 0);
  CHECK(testing::read_text(again) == testing::read_text(w.requests));
  CHECK(line_count(testing::read_text(again)) == 41);

  const auto empty = (w.dir / "empty.csv").string();
  REQUIRE(tirs_cli("gen-demand --graph " + w.graph + " --out " + empty + " --count 0").status == 0);
  CHECK(line_count(testing::read_text(empty)) == 1);

  const auto res = tirs_cli("gen-demand --graph " + w.graph + " --out " + (w.dir / "far.csv").string() +
                            " --count 5 --min-distance 1e7");
  CHECK(res.status != 0);
}

TEST_CASE("transit-reach") {
  Workspace w;
  const auto res = tirs_cli("transit-reach --graph " + w.graph + " --transit " + w.gtfs + " --requests " +
                            w.requests + " --distances 100,200,400");
  REQUIRE_MESSAGE(res.status == 0, res.output);
  std::istringstream in(res.output);
  std::string line;
  std::getline(in, line);
  CHECK(line == "distance_m,fraction");
  std::vector<double> fractions;
  while (std::getline(in, line)) fractions.push_back(std::stod(line.substr(line.find(',') + 1)));
  REQUIRE(fractions.size() == 3);
  CHECK(std::is_sorted(fractions.begin(), fractions.end()));

  CHECK(tirs_cli("transit-reach --graph " + w.graph + " --transit " + w.gtfs + " --requests " +
                 (w.dir / "nope.csv").string())
            .status != 0);
  CHECK(tirs_cli("transit-reach --graph " + w.graph + " --transit " + w.gtfs + " --requests " + w.requests +
                 " --distances 100,abc")
            .status != 0);
}

TEST_CASE("validate-data") {
  Workspace w;
  const auto res = tirs_cli("validate-data --graph " + w.graph + " --transit " + w.gtfs + " --requests " +
                            w.requests);
  REQUIRE(res.status == 0);
  CHECK(res.output.find("requests: 40") != std::string::npos);
  const auto bad = w.dir / "bad.csv";
  testing::write_text(bad, "node_id,x,y\n1,0,0\nedges\n1,2,3\n");
  const auto err = tirs_cli("validate-data --graph " + bad.string());
  CHECK(err.status == 2);
  CHECK(err.output.find("bad.csv:") != std::string::npos);
}
