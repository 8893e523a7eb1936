#pragma once

#include <cstddef>
#include <functional>

#include "kis/schedule.hpp"
#include "kis/world.hpp"

namespace kis {

/// Runs the world to quiescence (every unreturned live process is marked
/// blocked) or to config.step_bound scheduler steps (trace flagged truncated).
Trace run(World world, ScheduleSource& schedule);

enum class Exploration {
  /// Every distinct maximal interleaving, each yielded once.
  interleavings,
  /// Every reachable state visited once: one representative trace per
  /// distinct terminal state. Verdicts that depend only on the terminal state
  /// (views, decisions, crashes, occupancy peaks) cover all interleavings.
  states,
};

struct ExploreOptions {
  Exploration mode = Exploration::interleavings;
  std::size_t depth_bound = 100000;
};

struct ExploreStats {
  std::size_t traces = 0;
  std::size_t truncated = 0;
  std::size_t states = 0;
  bool stopped = false;
};

/// Depth-first enumeration over every process step, crash choice (within the
/// crash budget) and commit batch. The visitor returns false to stop early.
ExploreStats enumerate_runs(const World& initial, const ExploreOptions& options,
                            const std::function<bool(const Trace&)>& visit);

}  // namespace kis
