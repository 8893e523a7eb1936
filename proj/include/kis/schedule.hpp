#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kis/world.hpp"

namespace kis {

/// The adversary: picks the next action among the enabled ones.
class ScheduleSource {
 public:
  virtual ~ScheduleSource() = default;
  virtual Action choose(const World& world, std::span<const Action> enabled) = 0;
};

/// Picks the next enabled action through the source and checks it is legal.
/// Placeholder commits come back resolved to a concrete batch.
Action next_step(ScheduleSource& source, const World& world, std::span<const Action> enabled);

/// Process steps in cyclic pid order; commits the whole pending set when no
/// process can move. Never crashes anyone.
class RoundRobinSchedule : public ScheduleSource {
 public:
  Action choose(const World& world, std::span<const Action> enabled) override;

 private:
  int last_ = 0;
};

struct RandomScheduleOptions {
  /// Sample a crash budget in [0..t] with random victims and crash points.
  bool crashes = true;
  /// Crash exactly this many random victims before any other step.
  std::optional<int> initial_crashes;
  /// Crash points are drawn uniformly from [0, horizon) scheduler steps;
  /// 0 means n*(n+4).
  std::size_t horizon = 0;
};

/// Seeded random adversary. Each instance draws its own style up front:
/// per-process speeds, how eagerly it commits, and whether batches are
/// minimal or Bernoulli-sampled.
class RandomSchedule : public ScheduleSource {
 public:
  explicit RandomSchedule(std::uint64_t seed, RandomScheduleOptions options = {});
  Action choose(const World& world, std::span<const Action> enabled) override;

 private:
  void plan(const World& world);
  std::vector<ProcessId> sample_batch(const KisOracle& kis);

  std::mt19937_64 rng_;
  RandomScheduleOptions options_;
  bool planned_ = false;
  std::vector<std::pair<ProcessId, std::size_t>> crash_plan_;  // victim, step
  std::vector<double> speed_;
  double commit_bias_ = 0.5;
  bool minimal_batches_ = false;
  double batch_p_ = 0.5;
};

/// One persisted scheduler choice; objects are referenced by name.
struct ScheduledChoice {
  Action::Kind kind = Action::Kind::step;
  ProcessId pid{};
  std::string object;
  std::vector<ProcessId> batch;

  friend bool operator==(const ScheduledChoice&, const ScheduledChoice&) = default;
};

std::vector<ScheduledChoice> to_choices(const Trace& trace);

/// Replays persisted choices; throws ModelError when a choice is not enabled
/// or the schedule runs out while progress is still possible.
class ReplaySchedule : public ScheduleSource {
 public:
  explicit ReplaySchedule(std::vector<ScheduledChoice> choices) : choices_(std::move(choices)) {}
  Action choose(const World& world, std::span<const Action> enabled) override;

 private:
  std::vector<ScheduledChoice> choices_;
  std::size_t next_ = 0;
};

}  // namespace kis
