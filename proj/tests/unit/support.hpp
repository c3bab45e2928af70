#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "tirs/demand.hpp"
#include "tirs/netgraph.hpp"
#include "tirs/transit.hpp"

namespace testing {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tirs-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Nodes 0..n-1 on the x axis, edges i -> i+1 (and back when two_way).
inline tirs::RoadGraph line_graph(int n, double time, double distance, bool two_way = true) {
  tirs::RoadGraph g;
  for (int i = 0; i < n; ++i) g.add_node(i, {i * distance, 0.0});
  for (int i = 0; i + 1 < n; ++i) {
    g.add_edge(i, i + 1, time, distance);
    if (two_way) g.add_edge(i + 1, i, time, distance);
  }
  return g;
}

// Small integer weights so ties are common.
inline tirs::RoadGraph random_graph(int n, std::uint64_t seed, double density = 0.4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> w(1, 4);
  tirs::RoadGraph g;
  for (int i = 0; i < n; ++i) g.add_node(i, {coin(rng) * 100.0, coin(rng) * 100.0});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && coin(rng) < density) g.add_edge(a, b, w(rng) * 10.0, w(rng) * 100.0);
  return g;
}

inline tirs::Request request(tirs::RequestId id, tirs::NodeId o, tirs::NodeId d, double t,
                             const tirs::Router& router, tirs::QosParams qos = {}) {
  return tirs::make_request(id, o, d, t, router, qos);
}

}  // namespace testing
