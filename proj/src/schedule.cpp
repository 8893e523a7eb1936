#include "kis/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace kis {

Action next_step(ScheduleSource& source, const World& world, std::span<const Action> enabled) {
  if (enabled.empty()) throw ModelError("next_step on an empty enabled set");
  Action a = source.choose(world, enabled);
  bool listed = std::any_of(enabled.begin(), enabled.end(), [&](const Action& e) {
    if (e.kind != a.kind) return false;
    if (a.kind == Action::Kind::commit) return e.object == a.object && (e.batch.empty() || e.batch == a.batch);
    return e.pid == a.pid;
  });
  if (!listed || !world.is_enabled(a)) throw ModelError("schedule chose an action that is not enabled");
  return world.resolve(a);
}

Action RoundRobinSchedule::choose(const World& world, std::span<const Action> enabled) {
  const int n = world.process_count();
  for (int d = 1; d <= n; ++d) {
    ProcessId p{(last_ + d - 1) % n + 1};
    bool ok = std::any_of(enabled.begin(), enabled.end(),
                          [&](const Action& a) { return a.kind == Action::Kind::step && a.pid == p; });
    if (ok) {
      last_ = p.index;
      return Action::step(p);
    }
  }
  for (const auto& a : enabled) {
    if (a.kind == Action::Kind::commit) return world.resolve(a);
  }
  throw ModelError("round-robin schedule found nothing but crashes");
}

RandomSchedule::RandomSchedule(std::uint64_t seed, RandomScheduleOptions options)
    : rng_(seed), options_(options) {}

void RandomSchedule::plan(const World& world) {
  planned_ = true;
  const int n = world.process_count();
  const int t = world.config().t;
  int count = 0;
  if (options_.initial_crashes) {
    count = std::min(*options_.initial_crashes, t);
  } else if (options_.crashes && t > 0) {
    count = std::uniform_int_distribution<int>(0, t)(rng_);
  }
  std::vector<ProcessId> pids;
  for (int i = 1; i <= n; ++i) pids.push_back(ProcessId{i});
  std::shuffle(pids.begin(), pids.end(), rng_);
  std::size_t horizon = options_.horizon ? options_.horizon : static_cast<std::size_t>(n * (n + 4));
  for (int i = 0; i < count; ++i) {
    std::size_t at = options_.initial_crashes ? 0 : std::uniform_int_distribution<std::size_t>(0, horizon - 1)(rng_);
    crash_plan_.emplace_back(pids[static_cast<std::size_t>(i)], at);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> log_speed(-3.0, 3.0);
  for (int i = 0; i < n; ++i) speed_.push_back(std::exp(log_speed(rng_)));
  commit_bias_ = unit(rng_);
  minimal_batches_ = unit(rng_) < 0.5;
  batch_p_ = 0.05 + 0.9 * unit(rng_);
}

std::vector<ProcessId> RandomSchedule::sample_batch(const KisOracle& kis) {
  auto pending = kis.pending_pids();
  if (minimal_batches_) {
    // Just enough to pass the output-size gate, in random order.
    std::shuffle(pending.begin(), pending.end(), rng_);
    std::vector<ProcessId> b;
    for (ProcessId p : pending) {
      b.push_back(p);
      std::vector<ProcessId> sorted = b;
      std::sort(sorted.begin(), sorted.end());
      if (kis.can_commit(sorted)) return sorted;
    }
    std::sort(pending.begin(), pending.end());
    return pending;
  }
  std::bernoulli_distribution coin(batch_p_);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<ProcessId> b;
    for (ProcessId p : pending) {
      if (coin(rng_)) b.push_back(p);
    }
    if (kis.can_commit(b)) return b;
  }
  return pending;
}

Action RandomSchedule::choose(const World& world, std::span<const Action> enabled) {
  if (!planned_) plan(world);
  for (auto it = crash_plan_.begin(); it != crash_plan_.end(); ++it) {
    if (it->second > world.steps()) continue;
    ProcessId victim = it->first;
    crash_plan_.erase(it);
    if (world.is_enabled(Action::crash(victim))) return Action::crash(victim);
    break;
  }
  std::vector<const Action*> steps;
  std::vector<const Action*> commits;
  for (const auto& a : enabled) {
    if (a.kind == Action::Kind::step) steps.push_back(&a);
    if (a.kind == Action::Kind::commit) commits.push_back(&a);
  }
  if (steps.empty() && commits.empty()) throw ModelError("random schedule found nothing but crashes");
  Action a;
  if (!commits.empty() && (steps.empty() || std::bernoulli_distribution(commit_bias_)(rng_))) {
    a = *commits[std::uniform_int_distribution<std::size_t>(0, commits.size() - 1)(rng_)];
  } else {
    std::vector<double> w;
    for (const auto* s : steps) w.push_back(speed_.at(static_cast<std::size_t>(s->pid.index - 1)));
    a = *steps[std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng_)];
  }
  if (a.kind == Action::Kind::commit && a.batch.empty()) {
    const auto& kis = std::get<KisOracle>(world.object_at(a.object));
    a.batch = sample_batch(kis);
  }
  return a;
}

std::vector<ScheduledChoice> to_choices(const Trace& trace) {
  std::vector<ScheduledChoice> out;
  for (const auto& a : trace.schedule) {
    ScheduledChoice c{a.kind, a.pid, {}, a.batch};
    if (a.kind == Action::Kind::commit) c.object = trace.objects.at(a.object);
    out.push_back(std::move(c));
  }
  return out;
}

Action ReplaySchedule::choose(const World& world, std::span<const Action>) {
  if (next_ >= choices_.size()) throw ModelError("replay schedule exhausted");
  const auto& c = choices_[next_++];
  switch (c.kind) {
    case Action::Kind::step: return Action::step(c.pid);
    case Action::Kind::crash: return Action::crash(c.pid);
    case Action::Kind::commit: {
      auto obj = world.find_object(c.object);
      if (!obj) throw ModelError("replay references unknown object " + c.object);
      return Action::commit(*obj, c.batch);
    }
  }
  throw ModelError("bad replay choice");
}

}  // namespace kis
