#include "tirs/segments.hpp"

#include <algorithm>

namespace tirs {

const char* to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::FirstMile: return "first_mile";
    case SegmentKind::LastMile: return "last_mile";
    case SegmentKind::Direct: return "direct";
  }
  return "?";
}

bool same_option(const TravelSegment& a, const TravelSegment& b) {
  return a.request == b.request && a.leg == b.leg;
}

namespace {

struct Mile {
  bool walkable = false;
  Seconds walk = 0.0;
  std::optional<TravelCost> drive;
};

// Walkable iff within the distance limit and on time; `arrive_by` is the
// latest acceptable arrival at `to` when leaving `from` at `leave`.
Mile assess(const Router& router, const WalkParams& walk, NodeId from, NodeId to, Seconds leave,
            Seconds arrive_by) {
  Mile m;
  m.drive = router.cost(from, to);
  if (m.drive && m.drive->distance <= walk.max_walk) {
    m.walk = m.drive->distance / walk.speed;
    m.walkable = leave + m.walk <= arrive_by;
  }
  return m;
}

}  // namespace

std::vector<TravelSegment> decompose(const Request& r, std::span<const TransitLeg> legs,
                                     const Router& router, const WalkParams& walk,
                                     Seconds now) {
  const Seconds ready = std::max(now, r.request_time);
  std::vector<TravelSegment> out;

  TravelSegment direct;
  direct.kind = SegmentKind::Direct;
  direct.request = r.id;
  direct.pickup = r.origin;
  direct.dropoff = r.destination;
  direct.pickup_earliest = ready;
  direct.pickup_latest = r.deadline - r.sptt;
  direct.dropoff_deadline = r.deadline;
  out.push_back(direct);

  for (const TransitLeg& leg : legs) {
    const Mile first = assess(router, walk, r.origin, leg.depart_node, ready, leg.board_time);
    const Mile last =
        assess(router, walk, leg.arrive_node, r.destination, leg.alight_time, r.deadline);
    const bool first_ok =
        first.walkable || (first.drive && ready + first.drive->time <= leg.board_time);
    const bool last_ok =
        last.walkable || (last.drive && leg.alight_time + last.drive->time <= r.deadline);
    if (!first_ok || !last_ok) continue;

    TravelSegment fm;
    fm.kind = SegmentKind::FirstMile;
    fm.request = r.id;
    fm.leg = leg;
    fm.pickup = r.origin;
    fm.dropoff = leg.depart_node;
    fm.pickup_earliest = ready;
    fm.dropoff_deadline = leg.board_time;
    fm.pickup_latest = leg.board_time - (first.drive ? first.drive->time : 0.0);
    fm.empty = first.walkable;
    fm.walk_time = first.walk;

    TravelSegment lm;
    lm.kind = SegmentKind::LastMile;
    lm.request = r.id;
    lm.leg = leg;
    lm.pickup = leg.arrive_node;
    lm.dropoff = r.destination;
    lm.pickup_earliest = leg.alight_time;
    lm.dropoff_deadline = r.deadline;
    lm.pickup_latest = r.deadline - (last.drive ? last.drive->time : 0.0);
    lm.empty = last.walkable;
    lm.walk_time = last.walk;

    out.push_back(fm);
    out.push_back(lm);
  }
  return out;
}

bool transit_only_feasible(const Request& r, std::span<const TransitLeg> legs,
                           const Router& router, const WalkParams& walk, Seconds now) {
  const Seconds ready = std::max(now, r.request_time);
  return std::any_of(legs.begin(), legs.end(), [&](const TransitLeg& leg) {
    const Mile first = assess(router, walk, r.origin, leg.depart_node, ready, leg.board_time);
    if (!first.walkable) return false;
    const Mile last =
        assess(router, walk, leg.arrive_node, r.destination, leg.alight_time, r.deadline);
    return last.walkable;
  });
}

}  // namespace tirs
