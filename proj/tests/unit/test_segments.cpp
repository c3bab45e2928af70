#include <algorithm>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tirs/scenario.hpp"
#include "tirs/segments.hpp"

using namespace tirs;

namespace {

// Origin 0, stops at 1 and 2, destination 3. Distances in meters and times
// in seconds are chosen per test.
RoadGraph corridor(double d01, double t01, double d12, double t12, double d23, double t23) {
  RoadGraph g;
  for (int i = 0; i < 4; ++i) g.add_node(i, {i * 100.0, 0.0});
  auto both = [&](NodeId a, NodeId b, double t, double d) {
    g.add_edge(a, b, t, d);
    g.add_edge(b, a, t, d);
  };
  both(0, 1, t01, d01);
  both(1, 2, t12, d12);
  both(2, 3, t23, d23);
  return g;
}

TransitLeg leg_between(NodeId from, NodeId to, Seconds board, Seconds alight, std::size_t run = 0) {
  TransitLeg leg;
  leg.run = run;
  leg.depart_position = 0;
  leg.arrive_position = 1;
  leg.depart_node = from;
  leg.arrive_node = to;
  leg.board_time = board;
  leg.alight_time = alight;
  return leg;
}

}  // namespace

TEST_CASE("two legs give five segments") {
  const auto g = corridor(1000, 100, 2000, 200, 1000, 100);
  Router router(g);
  const auto r = testing::request(1, 0, 3, 0, router);
  const std::vector<TransitLeg> legs{leg_between(1, 2, 300, 400, 0), leg_between(1, 2, 500, 600, 1)};
  const auto segs = decompose(r, legs, router, {1.4, 400});
  REQUIRE(segs.size() == 5);
  CHECK(segs[0].kind == SegmentKind::Direct);
  CHECK(segs[0].pickup == 0);
  CHECK(segs[0].dropoff == 3);
  CHECK(segs[0].dropoff_deadline == r.deadline);
  CHECK(segs[0].pickup_latest == r.deadline - r.sptt);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& fm = segs[1 + 2 * k];
    const auto& lm = segs[2 + 2 * k];
    CHECK(fm.kind == SegmentKind::FirstMile);
    CHECK(lm.kind == SegmentKind::LastMile);
    CHECK(fm.leg == legs[k]);
    CHECK(lm.leg == legs[k]);
    CHECK(same_option(fm, lm));
    CHECK_FALSE(fm.empty);
    CHECK_FALSE(lm.empty);
    CHECK(fm.dropoff == legs[k].depart_node);
    CHECK(fm.dropoff_deadline == legs[k].board_time);
    CHECK(fm.pickup_latest == legs[k].board_time - 100);
    CHECK(lm.pickup == legs[k].arrive_node);
    CHECK(lm.pickup_earliest == legs[k].alight_time);
    CHECK(lm.dropoff_deadline == r.deadline);
    CHECK(fm.dropoff_deadline < lm.pickup_earliest);
  }
  CHECK_FALSE(same_option(segs[1], segs[3]));
}

TEST_CASE("a 50 m first mile is walked") {
  const auto g = corridor(50, 5, 2000, 200, 1000, 100);
  Router router(g);
  const auto r = testing::request(1, 0, 3, 0, router);
  const std::vector<TransitLeg> legs{leg_between(1, 2, 300, 400)};
  const auto segs = decompose(r, legs, router, {1.4, 400});
  REQUIRE(segs.size() == 3);
  CHECK(segs[1].empty);
  CHECK(segs[1].walk_time == doctest::Approx(50 / 1.4));
  CHECK_FALSE(segs[2].empty);
  CHECK(segs[1].pickup_earliest + segs[1].walk_time <= segs[1].dropoff_deadline);
}

TEST_CASE("a first mile that is too slow to walk is driven or dropped") {
  // 840 m takes 600 s on foot; the bus leaves 300 s after the request.
  SUBCASE("driving makes it") {
    const auto g = corridor(840, 200, 2000, 200, 1000, 100);
    Router router(g);
    const auto r = testing::request(1, 0, 3, 0, router);
    const std::vector<TransitLeg> legs{leg_between(1, 2, 300, 500)};
    const auto segs = decompose(r, legs, router, {1.4, 1000});
    REQUIRE(segs.size() == 3);
    CHECK_FALSE(segs[1].empty);
    CHECK(segs[1].pickup_latest == 100);
  }
  SUBCASE("driving does not make it either") {
    const auto g = corridor(840, 400, 2000, 200, 1000, 100);
    Router router(g);
    const auto r = testing::request(1, 0, 3, 0, router);
    const std::vector<TransitLeg> legs{leg_between(1, 2, 300, 500)};
    const auto segs = decompose(r, legs, router, {1.4, 1000});
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].kind == SegmentKind::Direct);
  }
  SUBCASE("an unreachable last mile drops the leg") {
    const auto g = corridor(840, 200, 2000, 200, 1000, 100);
    Router router(g);
    const auto r = testing::request(1, 0, 3, 0, router, {0.0, 0.0});
    const std::vector<TransitLeg> legs{leg_between(1, 2, 300, r.deadline)};
    CHECK(decompose(r, legs, router, {1.4, 1000}).size() == 1);
  }
}

TEST_CASE("a later decision time shifts the windows") {
  const auto g = corridor(1000, 100, 2000, 200, 1000, 100);
  Router router(g);
  const auto r = testing::request(1, 0, 3, 0, router);
  const std::vector<TransitLeg> legs{leg_between(1, 2, 300, 400)};
  auto segs = decompose(r, legs, router, {1.4, 400}, 150);
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].pickup_earliest == 150);
  CHECK(segs[1].pickup_earliest == 150);
  segs = decompose(r, legs, router, {1.4, 400}, 201);
  CHECK(segs.size() == 1);
}

TEST_CASE("transit_only_feasible") {
  // Walks of 70 m take 50 s; the ride itself takes 114 s by car.
  const auto g = corridor(70, 7, 1000, 100, 70, 7);
  Router router(g);
  const WalkParams walk{1.4, 400};
  const auto exact = testing::request(1, 0, 3, 0, router, {0.0, 136});
  REQUIRE(exact.deadline == 250);
  const std::vector<TransitLeg> legs{leg_between(1, 2, 50, 200)};
  CHECK(transit_only_feasible(exact, legs, router, walk));
  CHECK_FALSE(transit_only_feasible(exact, {}, router, walk));

  const auto late = testing::request(1, 0, 3, 0, router, {0.0, 135.9});
  CHECK_FALSE(transit_only_feasible(late, legs, router, walk));
  CHECK_FALSE(transit_only_feasible(exact, legs, router, walk, 0.5));
  CHECK_FALSE(transit_only_feasible(exact, legs, router, {1.4, 69}));

  // Both miles empty on the decomposed leg.
  const auto segs = decompose(exact, legs, router, walk);
  REQUIRE(segs.size() == 3);
  CHECK(segs[1].empty);
  CHECK(segs[2].empty);
}

TEST_CASE("decomposition invariants on random requests") {
  const auto g = make_grid({6, 6, 100, 12});
  Router router(g);
  TransitSchedule s;
  for (NodeId n : {12, 14, 16, 17}) s.stops.push_back({"s", g.position(n), n});
  s.lines.push_back(make_line("x", {0, 1, 2, 3}, {24, 24, 12}, 5, 0, 2000, 120, 10));
  CapacityLedger ledger(s);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> node(0, 35);
  const WalkParams walk{1.4, 250};
  std::size_t empties = 0, legs_total = 0;
  for (int k = 0; k < 400; ++k) {
    const int o = node(rng), d = node(rng);
    if (o == d) continue;
    const auto r = testing::request(k, o, d, (k % 10) * 100.0, router, {0.3, 200});
    const auto legs = enumerate_legs(r, s, router, r.request_time, ledger);
    const auto segs = decompose(r, legs, router, walk);
    REQUIRE(!segs.empty());
    CHECK(segs[0].kind == SegmentKind::Direct);
    CHECK((segs.size() - 1) % 2 == 0);
    legs_total += legs.size();
    for (std::size_t i = 1; i < segs.size(); i += 2) {
      const auto& fm = segs[i];
      const auto& lm = segs[i + 1];
      REQUIRE(fm.kind == SegmentKind::FirstMile);
      REQUIRE(lm.kind == SegmentKind::LastMile);
      CHECK(fm.leg == lm.leg);
      CHECK(fm.dropoff_deadline < lm.pickup_earliest);
      for (const auto* seg : {&fm, &lm}) {
        if (!seg->empty) continue;
        ++empties;
        const auto w = router.walk_time(seg->pickup, seg->dropoff, walk.speed);
        REQUIRE(w);
        CHECK(*w == doctest::Approx(seg->walk_time));
        CHECK(router.cost(seg->pickup, seg->dropoff)->distance <= walk.max_walk);
        CHECK(seg->pickup_earliest + seg->walk_time <= seg->dropoff_deadline);
      }
    }
  }
  CHECK(legs_total > 50);
  CHECK(empties > 10);
}
