#include <algorithm>
#include <array>

#include "doctest.h"
#include "support.hpp"
#include "tirs/demand.hpp"
#include "tirs/errors.hpp"
#include "tirs/scenario.hpp"

using namespace tirs;

TEST_CASE("max_travel_time") {
  CHECK(max_travel_time(600, 0.2, 1200) == 1920);
  CHECK(max_travel_time(0, 0.7, 333) == 333);
  CHECK(max_travel_time(1000, 0, 0) == 1000);
}

TEST_CASE("make_request caches the direct path") {
  const auto g = testing::line_graph(4, 10, 100);
  Router router(g);
  const auto r = make_request(5, 0, 3, 50, router, {0.5, 100});
  CHECK(r.sptt == 30);
  CHECK(r.direct_distance == 300);
  CHECK(r.deadline == 50 + 45 + 100);
  CHECK_THROWS_AS(make_request(1, 2, 2, 0, router, {}), DataError);
  CHECK_THROWS_AS(make_request(1, 2, 99, 0, router, {}), DataError);
  const auto one_way = testing::line_graph(3, 10, 100, false);
  Router r2(one_way);
  CHECK_THROWS_AS(make_request(1, 2, 0, 0, r2, {}), DataError);
}

TEST_CASE("generate_demand basics") {
  const auto g = make_grid({});
  Router router(g);
  DemandConfig cfg;
  CHECK(generate_demand(cfg, router).empty());

  cfg.count = 301;
  cfg.seed = 7;
  const auto a = generate_demand(cfg, router);
  const auto b = generate_demand(cfg, router);
  REQUIRE(a.size() == 301);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].origin == b[i].origin);
    CHECK(a[i].destination == b[i].destination);
    CHECK(a[i].request_time == b[i].request_time);
    CHECK(a[i].id == static_cast<RequestId>(i));
    if (i > 0) CHECK(a[i - 1].request_time <= a[i].request_time);
    // Re-query rather than trusting the cached fields.
    const auto p = shortest_path(g, a[i].origin, a[i].destination);
    REQUIRE(p);
    CHECK(p->distance >= 3000);
    CHECK(a[i].sptt == p->travel_time);
    CHECK(a[i].deadline == a[i].request_time + max_travel_time(p->travel_time, 0.2, 1200));
  }
  const auto morning = std::count_if(a.begin(), a.end(), [&](const Request& r) {
    return r.request_time >= cfg.morning.start && r.request_time < cfg.morning.end;
  });
  const auto evening = std::count_if(a.begin(), a.end(), [&](const Request& r) {
    return r.request_time >= cfg.evening.start && r.request_time < cfg.evening.end;
  });
  CHECK(morning == 151);
  CHECK(evening == 150);

  cfg.seed = 8;
  const auto c = generate_demand(cfg, router);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].origin != c[i].origin;
  CHECK(differs);
}

TEST_CASE("generate_demand errors") {
  const auto g = make_grid({3, 3, 100, 10});
  Router router(g);
  DemandConfig cfg;
  cfg.count = 1;
  cfg.min_trip_distance = 5000;
  cfg.max_draws_per_request = 500;
  CHECK_THROWS_AS(generate_demand(cfg, router), GenerationError);
  cfg.min_trip_distance = -1;
  CHECK_THROWS_AS(generate_demand(cfg, router), DataError);
  cfg.min_trip_distance = 0;
  cfg.morning = {100, 100};
  CHECK_THROWS_AS(generate_demand(cfg, router), DataError);
  RoadGraph lonely;
  lonely.add_node(0, {});
  Router r1(lonely);
  DemandConfig one;
  one.count = 1;
  CHECK_THROWS_AS(generate_demand(one, r1), GenerationError);
}

TEST_CASE("request times are uniform within each window") {
  const auto g = make_grid({4, 4, 100, 10});
  Router router(g);
  DemandConfig cfg;
  cfg.count = 20000;
  cfg.min_trip_distance = 0;
  cfg.seed = 2024;
  const auto reqs = generate_demand(cfg, router);
  constexpr int kBins = 20;
  // Upper 1% point of chi-square with 19 degrees of freedom.
  constexpr double kCritical = 36.191;
  for (const TimeWindow w : {cfg.morning, cfg.evening}) {
    std::array<int, kBins> bins{};
    int n = 0;
    for (const auto& r : reqs)
      if (r.request_time >= w.start && r.request_time < w.end) {
        ++bins[static_cast<std::size_t>((r.request_time - w.start) / (w.end - w.start) * kBins)];
        ++n;
      }
    REQUIRE(n == 10000);
    const double expected = static_cast<double>(n) / kBins;
    double chi2 = 0.0;
    for (int b : bins) chi2 += (b - expected) * (b - expected) / expected;
    CHECK(chi2 < kCritical);
  }
}

TEST_CASE("requests file round trip recomputes deadlines") {
  testing::TempDir dir;
  const auto g = make_grid({});
  Router router(g);
  DemandConfig cfg;
  cfg.count = 40;
  const auto reqs = generate_demand(cfg, router);
  write_requests(reqs, dir / "r.csv");
  const auto back = load_requests(dir / "r.csv", router, {0.5, 60});
  REQUIRE(back.size() == reqs.size());
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    CHECK(back[i].id == reqs[i].id);
    CHECK(back[i].request_time == reqs[i].request_time);
    CHECK(back[i].deadline == back[i].request_time + 1.5 * back[i].sptt + 60);
  }
  testing::write_text(dir / "bad.csv", "id,origin,destination,request_time_s\n1,3,3,0\n");
  CHECK_THROWS_WITH_AS(load_requests(dir / "bad.csv", router, {}),
                       doctest::Contains("bad.csv:2"), DataError);
}
