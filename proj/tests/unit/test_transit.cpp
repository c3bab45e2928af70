#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles/brute_plan.hpp"
#include "support.hpp"
#include "tirs/errors.hpp"
#include "tirs/scenario.hpp"
#include "tirs/transit.hpp"

using namespace tirs;
using testing::TempDir;
using testing::write_text;

namespace {

const char* kStops = "stop_id,x,y\nA,0,0\nB,100,0\nC,205,0\n";
const char* kRoutes = "route_id\nR\n";
const char* kTrips = "trip_id,route_id,capacity\nT1,R,50\nT2,R,50\n";

void write_gtfs(const std::filesystem::path& dir, const std::string& stops,
                const std::string& times) {
  write_text(dir / "stops.txt", stops);
  write_text(dir / "routes.txt", kRoutes);
  write_text(dir / "trips.txt", kTrips);
  write_text(dir / "stop_times.txt", times);
}

const char* kTimes =
    "trip_id,stop_sequence,stop_id,arrival_s,departure_s\n"
    "T2,1,A,700,700\nT2,2,B,720,730\nT2,3,C,750,750\n"
    "T1,1,A,100,100\nT1,2,B,120,130\nT1,3,C,150,150\n";

// Five-by-five grid (100 m, 10 s) with a horizontal line on row 2 and a
// vertical one on column 2, three runs each.
struct ToyCity {
  RoadGraph g = make_grid({5, 5, 100.0, 10.0});
  TransitSchedule s;
  ToyCity() {
    for (NodeId n : {10, 11, 12, 13, 14, 2, 7, 17, 22})
      s.stops.push_back({"s" + std::to_string(n), g.position(n), n});
    s.lines.push_back(make_line("h", {0, 1, 2, 3, 4}, {10, 10, 10, 10}, 5, 100, 500, 200, 2));
    s.lines.push_back(make_line("v", {5, 6, 2, 7, 8}, {10, 10, 10, 10}, 5, 150, 550, 200, 2));
  }
};

}  // namespace

TEST_CASE("load_schedule reads the GTFS subset") {
  TempDir dir;
  const auto g = testing::line_graph(3, 10, 100);
  write_gtfs(dir.path(), kStops, kTimes);
  const auto s = load_schedule(dir.path(), g);
  REQUIRE(s.lines.size() == 1);
  CHECK(s.lines[0].stops.size() == 3);
  REQUIRE(s.lines[0].runs.size() == 2);
  CHECK(s.lines[0].runs[0].id == "T1");
  CHECK(s.lines[0].runs[0].departure[1] == 130);
  CHECK(s.stops[2].node == 2);
  CHECK(s.run_count() == 2);
  CHECK(unpruned_leg_count(s) == 12);

  TempDir out;
  write_schedule(s, out.path());
  const auto t = load_schedule(out.path(), g);
  REQUIRE(t.lines.size() == 1);
  CHECK(t.lines[0].runs[1].arrival == s.lines[0].runs[1].arrival);
  CHECK(t.lines[0].runs[1].capacity == 50);
}

TEST_CASE("load_schedule rejects bad inputs") {
  const auto g = testing::line_graph(3, 10, 100);
  {
    TempDir dir;
    write_gtfs(dir.path(), kStops,
               "trip_id,stop_sequence,stop_id,arrival_s,departure_s\n"
               "T1,1,A,100,100\nT1,2,B,90,95\nT1,3,C,150,150\n"
               "T2,1,A,700,700\nT2,2,B,720,730\nT2,3,C,750,750\n");
    CHECK_THROWS_WITH_AS(load_schedule(dir.path(), g),
                         doctest::Contains("not strictly increasing"), DataError);
  }
  {
    TempDir dir;
    write_gtfs(dir.path(), "stop_id,x,y\nA,0,0\nB,100,0\nC,10200,0\n", kTimes);
    CHECK_THROWS_WITH_AS(load_schedule(dir.path(), g, 500.0), doctest::Contains("snap radius"),
                         DataError);
  }
  {
    TempDir dir;
    write_gtfs(dir.path(), kStops, kTimes);
    std::filesystem::remove(dir / "trips.txt");
    CHECK_THROWS_WITH_AS(load_schedule(dir.path(), g), doctest::Contains("trips.txt"),
                         DataError);
  }
  CHECK_THROWS_AS(load_schedule("/nonexistent/gtfs", g), DataError);
}

TEST_CASE("unpruned leg counts") {
  TransitSchedule s;
  s.stops = {{"a", {}, 0}, {"b", {}, 1}};
  s.lines.push_back(make_line("x", {0, 1}, {10}, 0, 0, 0, 60, 5));
  CHECK(unpruned_leg_count(s) == 2);
  ToyCity city;
  CHECK(unpruned_leg_count(city.s) == 2 * 3 * 5 * 4);
}

TEST_CASE("enumerate_legs single candidate and departure check") {
  const auto g = testing::line_graph(6, 10, 100);
  Router router(g);
  TransitSchedule s;
  for (NodeId n : {1, 4}) s.stops.push_back({"s", g.position(n), n});
  s.lines.push_back(make_line("x", {0, 1}, {20}, 0, 100, 100, 60, 5));
  CapacityLedger ledger(s);

  const Request r = testing::request(1, 0, 5, 0, router, {0.2, 1200});
  const auto legs = enumerate_legs(r, s, router, 0, ledger);
  REQUIRE(legs.size() == 1);
  CHECK(legs[0].depart_node == 1);
  CHECK(legs[0].arrive_node == 4);
  CHECK(legs[0].board_time == 100);
  CHECK(legs[0].alight_time == 120);

  // Driving to the stop takes 10 s, so a decision at 95 misses the 100 departure.
  CHECK(enumerate_legs(r, s, router, 90, ledger).size() == 1);
  CHECK(enumerate_legs(r, s, router, 95, ledger).empty());

  // Reverse direction: the nearest departure stop does not precede the arrival.
  const Request back = testing::request(2, 5, 0, 0, router);
  CHECK(enumerate_legs(back, s, router, 0, ledger).empty());

  ledger.reserve(legs[0]);
  for (int k = 0; k < 4; ++k) ledger.reserve(legs[0]);
  CHECK(enumerate_legs(r, s, router, 0, ledger).empty());
}

TEST_CASE("enumerate_legs equals a brute-force filter over nearest-stop tuples") {
  ToyCity city;
  Router router(city.g);
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> node(0, 24);
  std::uniform_real_distribution<double> when(0, 600);
  CapacityLedger ledger(city.s);
  // Fill one run so the seat check matters.
  ledger.reserve(make_leg(city.s, 0, 1, 0, 4));
  ledger.reserve(make_leg(city.s, 0, 1, 1, 3));

  const auto all = oracle::all_legs(city.s);
  std::size_t nonempty = 0;
  for (int k = 0; k < 300; ++k) {
    const int o = node(rng), d = node(rng);
    if (o == d) continue;
    const Request r = testing::request(k, o, d, std::floor(when(rng)), router, {0.2, 300});
    const Seconds now = r.request_time + (k % 3) * 20.0;

    std::vector<TransitLeg> want;
    for (std::size_t l = 0; l < city.s.lines.size(); ++l) {
      const auto& line = city.s.lines[l];
      std::size_t best_d = 0, best_a = 0;
      for (std::size_t p = 1; p < line.stops.size(); ++p) {
        if (router.cost(o, city.s.stop_at(l, p).node)->time <
            router.cost(o, city.s.stop_at(l, best_d).node)->time)
          best_d = p;
        if (router.cost(city.s.stop_at(l, p).node, d)->time <
            router.cost(city.s.stop_at(l, best_a).node, d)->time)
          best_a = p;
      }
      for (const auto& leg : all) {
        if (leg.line != l || leg.depart_position != best_d || leg.arrive_position != best_a)
          continue;
        const double first = router.cost(o, leg.depart_node)->time;
        const double last = router.cost(leg.arrive_node, d)->time;
        if (now + first > leg.board_time) continue;
        if (leg.alight_time + last > r.deadline) continue;
        if (!ledger.has_seat(leg)) continue;
        want.push_back(leg);
      }
    }
    std::stable_sort(want.begin(), want.end(),
                     [](const auto& a, const auto& b) { return a.board_time < b.board_time; });
    const auto got = enumerate_legs(r, city.s, router, now, ledger);
    CHECK(got == want);
    CHECK(got.size() <= city.s.run_count());
    for (const auto& leg : got) CHECK(leg_passes_checks(r, leg, router, now, ledger));
    nonempty += !got.empty();
  }
  CHECK(nonempty > 20);
}

TEST_CASE("capacity ledger") {
  ToyCity city;
  city.s.lines[0].runs[0].capacity = 1;
  CapacityLedger ledger(city.s);
  const CapacityLedger initial = ledger;
  const TransitLeg leg = make_leg(city.s, 0, 0, 1, 3);

  SUBCASE("second reservation on a full interval fails") {
    ledger.reserve(leg);
    CHECK_THROWS_AS(ledger.reserve(make_leg(city.s, 0, 0, 2, 4)), CapacityError);
    CHECK(ledger.occupancy(0, 0, 2) == 1);
    CHECK(ledger.occupancy(0, 0, 3) == 0);
    // Touching intervals do not overlap.
    ledger.reserve(make_leg(city.s, 0, 0, 3, 4));
    ledger.reserve(make_leg(city.s, 0, 0, 0, 1));
  }
  SUBCASE("reserve then release restores the ledger") {
    ledger.reserve(leg);
    ledger.release(leg);
    CHECK(ledger == initial);
    CHECK_THROWS_AS(ledger.release(leg), LedgerError);
  }
  SUBCASE("overlapping legs with two seats") {
    const TransitLeg a = make_leg(city.s, 1, 0, 0, 3);
    const TransitLeg b = make_leg(city.s, 1, 0, 1, 4);
    ledger.reserve(a);
    ledger.reserve(b);
    CHECK(ledger.occupancy(1, 0, 0) == 1);
    CHECK(ledger.occupancy(1, 0, 1) == 2);
    CHECK(ledger.occupancy(1, 0, 2) == 2);
    CHECK(ledger.occupancy(1, 0, 3) == 1);
    CHECK_FALSE(ledger.has_seat(make_leg(city.s, 1, 0, 2, 3)));
    CHECK(ledger.total_occupancy() == 6);
    CHECK(ledger.reservation_count() == 2);
  }
}

TEST_CASE("ledger conservation under random reserve and release") {
  ToyCity city;
  CapacityLedger ledger(city.s);
  std::mt19937_64 rng(9);
  std::vector<TransitLeg> held;
  const auto all = oracle::all_legs(city.s);
  std::int64_t seats = 0;
  for (int k = 0; k < 2000; ++k) {
    if (!held.empty() && rng() % 3 == 0) {
      const std::size_t i = rng() % held.size();
      ledger.release(held[i]);
      seats -= static_cast<std::int64_t>(held[i].arrive_position - held[i].depart_position);
      held.erase(held.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      const auto& leg = all[rng() % all.size()];
      if (!ledger.has_seat(leg)) {
        CHECK_THROWS_AS(ledger.reserve(leg), CapacityError);
        continue;
      }
      ledger.reserve(leg);
      held.push_back(leg);
      seats += static_cast<std::int64_t>(leg.arrive_position - leg.depart_position);
    }
    REQUIRE(ledger.total_occupancy() == seats);
    REQUIRE(ledger.reservation_count() == static_cast<std::int64_t>(held.size()));
  }
  for (const auto& leg : held) ledger.release(leg);
  CHECK(ledger == CapacityLedger(city.s));
}

TEST_CASE("validate_schedule catches unknown nodes and capacities") {
  ToyCity city;
  CHECK_NOTHROW(validate_schedule(city.s, city.g));
  auto bad = city.s;
  bad.stops[0].node = 999;
  CHECK_THROWS_AS(validate_schedule(bad, city.g), DataError);
  bad = city.s;
  bad.lines[0].runs[0].capacity = 0;
  CHECK_THROWS_AS(validate_schedule(bad, city.g), DataError);
  bad = city.s;
  bad.lines[0].runs[0].arrival[2] = 0;
  CHECK_THROWS_AS(validate_schedule(bad, city.g), DataError);
}
