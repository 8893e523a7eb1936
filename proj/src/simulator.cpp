#include "kis/simulator.hpp"

#include <unordered_set>

namespace kis {

Trace run(World world, ScheduleSource& schedule) {
  const std::size_t bound = world.config().step_bound;
  while (world.has_progress()) {
    if (world.steps() >= bound) {
      world.finish(true);
      return world.trace();
    }
    auto enabled = world.enabled_actions(false);
    world.apply(next_step(schedule, world, enabled));
  }
  world.finish(false);
  return world.trace();
}

namespace {

class Explorer {
 public:
  Explorer(const ExploreOptions& options, const std::function<bool(const Trace&)>& visit)
      : options_(options), visit_(visit) {}

  void dfs(const World& w, std::size_t depth) {
    if (stats_.stopped) return;
    if (options_.mode == Exploration::states) {
      if (!seen_.insert(w.digest()).second) return;
      stats_.states = seen_.size();
    }
    if (!w.has_progress() || depth >= options_.depth_bound) {
      const bool truncated = w.has_progress();
      World end = w;
      end.finish(truncated);
      ++stats_.traces;
      if (truncated) ++stats_.truncated;
      if (!visit_(end.trace())) stats_.stopped = true;
      return;
    }
    for (const auto& a : w.enabled_actions(true)) {
      World next = w;
      next.apply(a);
      dfs(next, depth + 1);
      if (stats_.stopped) return;
    }
  }

  ExploreStats stats() const { return stats_; }

 private:
  const ExploreOptions& options_;
  const std::function<bool(const Trace&)>& visit_;
  std::unordered_set<StateDigest, StateDigestHash> seen_;
  ExploreStats stats_;
};

}  // namespace

ExploreStats enumerate_runs(const World& initial, const ExploreOptions& options,
                            const std::function<bool(const Trace&)>& visit) {
  Explorer ex(options, visit);
  ex.dfs(initial, 0);
  return ex.stats();
}

}  // namespace kis
