#include "tirs/pdp.hpp"

#include <algorithm>
#include <limits>

namespace tirs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Job {
  RouteEvent event;
  int partner = -1;  // index of the pickup a dropoff depends on
};

class Search {
 public:
  Search(const VehicleState& v, std::span<const TravelSegment> trip, const Router& router,
         Seconds now, const PdpOptions& opts)
      : opts_(opts), capacity_(v.capacity) {
    for (const auto& p : v.onboard)
      jobs_.push_back({{EventType::Dropoff, p.request, p.kind, p.dropoff, 0.0, p.deadline, 0.0}});
    auto add_segment = [&](const TravelSegment& s) {
      const int pick = static_cast<int>(jobs_.size());
      jobs_.push_back({{EventType::Pickup, s.request, s.kind, s.pickup, s.pickup_earliest,
                        s.pickup_latest, 0.0}});
      jobs_.push_back({{EventType::Dropoff, s.request, s.kind, s.dropoff, 0.0,
                        s.dropoff_deadline, 0.0},
                       pick});
    };
    for (const auto& s : v.pending) add_segment(s);
    for (const auto& s : trip) add_segment(s);
    initial_load_ = static_cast<int>(v.onboard.size());

    // nodes_[0] is the start; nodes_[i + 1] is job i.
    std::vector<NodeId> nodes{v.location};
    for (const auto& j : jobs_) nodes.push_back(j.event.node);
    const std::size_t n = nodes.size();
    time_.assign(n * n, kInf);
    dist_.assign(n * n, kInf);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (b == 0) continue;
        if (auto c = router.cost(nodes[a], nodes[b])) {
          time_[a * n + b] = c->time;
          dist_[a * n + b] = c->distance;
        }
      }
    width_ = n;
    start_time_ = std::max(now, v.available_time);
  }

  PdpRoute run() {
    PdpRoute out;
    if (jobs_.size() > opts_.max_events || initial_load_ > capacity_) return out;
    done_.assign(jobs_.size(), 0);
    order_.clear();
    times_.clear();
    best_cost_ = kInf;
    dfs(0, start_time_, 0.0, 0.0, initial_load_);
    if (best_order_.empty() && !jobs_.empty()) return out;
    out.feasible = true;
    out.distance = best_distance_;
    out.drive_time = best_drive_;
    for (std::size_t k = 0; k < best_order_.size(); ++k) {
      RouteEvent e = jobs_[best_order_[k]].event;
      e.time = best_times_[k];
      out.events.push_back(e);
    }
    return out;
  }

  double cost_of(const PdpRoute& r) const {
    return opts_.metric == CostMetric::Distance ? r.distance : r.drive_time;
  }

 private:
  void dfs(std::size_t at, Seconds clock, Meters distance, Seconds drive, int load) {
    const double cost = opts_.metric == CostMetric::Distance ? distance : drive;
    if (cost >= best_cost_) return;
    if (order_.size() == jobs_.size()) {
      best_cost_ = cost;
      best_distance_ = distance;
      best_drive_ = drive;
      best_order_ = order_;
      best_times_ = times_;
      return;
    }
    for (std::size_t j = 0; j < jobs_.size(); ++j) {
      if (done_[j]) continue;
      const Job& job = jobs_[j];
      if (job.partner >= 0 && !done_[job.partner]) continue;
      const bool pickup = job.event.type == EventType::Pickup;
      if (pickup && load + 1 > capacity_) continue;
      const std::size_t cell = at * width_ + (j + 1);
      const Seconds leg = time_[cell];
      if (leg == kInf) continue;
      Seconds service = clock + leg;
      if (pickup) service = std::max(service, job.event.earliest);
      if (service > job.event.latest) continue;
      done_[j] = 1;
      order_.push_back(j);
      times_.push_back(service);
      dfs(j + 1, service, distance + dist_[cell], drive + leg, pickup ? load + 1 : load - 1);
      times_.pop_back();
      order_.pop_back();
      done_[j] = 0;
    }
  }

  PdpOptions opts_;
  int capacity_;
  int initial_load_ = 0;
  std::vector<Job> jobs_;
  std::vector<double> time_, dist_;
  std::size_t width_ = 0;
  Seconds start_time_ = 0.0;

  std::vector<char> done_;
  std::vector<std::size_t> order_, best_order_;
  std::vector<Seconds> times_, best_times_;
  double best_cost_ = kInf;
  Meters best_distance_ = 0.0;
  Seconds best_drive_ = 0.0;
};

}  // namespace

PdpRoute base_route(const VehicleState& v, const Router& router, Seconds now,
                    const PdpOptions& opts) {
  return Search(v, {}, router, now, opts).run();
}

PdpRoute pdp_route(const VehicleState& v, std::span<const TravelSegment> trip,
                   const Router& router, Seconds now, const PdpOptions& opts,
                   const PdpRoute* base) {
  PdpRoute prior;
  if (!base) {
    prior = base_route(v, router, now, opts);
    base = &prior;
  }
  if (!base->feasible) return {};
  Search search(v, trip, router, now, opts);
  PdpRoute out = search.run();
  if (!out.feasible) return out;
  out.added_distance = out.distance - base->distance;
  out.added_cost = search.cost_of(out) - search.cost_of(*base);
  return out;
}

}  // namespace tirs
