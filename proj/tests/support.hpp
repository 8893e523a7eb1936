#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "kis/checkers.hpp"
#include "kis/schedule.hpp"
#include "kis/simulator.hpp"
#include "kis/world.hpp"

namespace kis::test {

/// Writes each of its registers once, in order, then returns.
class WritesProgram : public ClonableProgram<WritesProgram> {
 public:
  WritesProgram(std::vector<ObjectRef<ValueRegisters>> regs, Value v) : regs_(std::move(regs)), value_(std::move(v)) {}

  void step(StepContext& ctx) override {
    if (next_ < regs_.size()) ctx.write(regs_[next_++], value_);
    if (next_ == regs_.size()) ctx.finish(value_);
  }
  void hash_into(StateHasher& h) const override { h.add(next_); }

 private:
  std::vector<ObjectRef<ValueRegisters>> regs_;
  Value value_;
  std::size_t next_ = 0;
};

/// `procs` processes, each writing once to each of `arrays` register arrays.
inline World writes_world(int procs, int arrays, int t) {
  World w(ModelConfig{procs, t, 0, 0, 1000});
  std::vector<ObjectRef<ValueRegisters>> regs;
  for (int a = 0; a < arrays; ++a) regs.push_back(w.add_object("R" + std::to_string(a), ValueRegisters(procs)));
  for (int p = 1; p <= procs; ++p) w.add_process(std::make_unique<WritesProgram>(regs, Value(p * 10)));
  return w;
}

/// Plays the scripted actions first, then behaves like round-robin.
class ScriptedSchedule : public ScheduleSource {
 public:
  explicit ScriptedSchedule(std::vector<Action> script) : script_(script.begin(), script.end()) {}

  Action choose(const World& world, std::span<const Action> enabled) override {
    if (!script_.empty()) {
      Action a = script_.front();
      script_.pop_front();
      return a;
    }
    return fallback_.choose(world, enabled);
  }

 private:
  std::deque<Action> script_;
  RoundRobinSchedule fallback_;
};

// ---------------------------------------------------------------------------
// Hand-built histories.

struct HandOp {
  int pid;
  Value input;
  std::optional<View> view;  // nullopt: no response
  bool crashed = false;
};

inline View view_of(std::initializer_list<std::pair<int, std::int64_t>> pairs) {
  std::vector<Pair> v;
  for (auto [p, x] : pairs) v.push_back(Pair{ProcessId{p}, Value(x)});
  return View(std::move(v));
}

/// A trace on object `obj`: every op invokes in pid order, then responses and
/// crashes follow in the same order.
inline Trace hand_trace(int n, int k, const std::vector<HandOp>& ops, const std::string& obj = "kis") {
  Trace tr;
  tr.config = ModelConfig{n, std::max(1, k), k, 0, 1000};
  tr.objects = {obj};
  tr.outcomes.assign(static_cast<std::size_t>(n), Outcome{ProcessStatus::returned, std::nullopt});
  std::uint64_t step = 0;
  auto add = [&](EventKind kind, int pid, std::string object, std::string op, Json args, Json ret) {
    tr.events.push_back(Event{step++, kind, ProcessId{pid}, std::move(object), std::move(op), std::move(args), std::move(ret)});
  };
  for (const auto& o : ops) add(EventKind::invoke, o.pid, obj, "write_snapshot_k", to_json(o.input), Json());
  for (const auto& o : ops) {
    auto& out = tr.outcomes[static_cast<std::size_t>(o.pid - 1)];
    if (o.view) {
      add(EventKind::respond, o.pid, obj, "write_snapshot_k", Json(), to_json(*o.view));
      out = Outcome{ProcessStatus::returned, Value(*o.view)};
    } else if (!o.crashed) {
      out = Outcome{ProcessStatus::blocked, std::nullopt};
    }
    if (o.crashed) {
      add(EventKind::crash, o.pid, "", "crash", Json(), Json());
      out = Outcome{ProcessStatus::crashed, std::nullopt};
    }
  }
  return tr;
}

struct NegativeCase {
  std::string property;  // the verdict expected to fail
  std::string check;     // "is" or "theorem1"
  Trace trace;
  int k;
};

/// One failing history per checked property.
inline std::vector<NegativeCase> negative_corpus() {
  std::vector<NegativeCase> out;
  // p2's view lacks its own pair.
  out.push_back({"self_inclusion", "is",
                 hand_trace(3, 2, {{1, 10, view_of({{1, 10}})}, {2, 20, view_of({{1, 10}})}}), 2});
  // p3 never invoked yet appears in both views.
  out.push_back({"validity", "is",
                 hand_trace(3, 2, {{1, 10, view_of({{1, 10}, {3, 30}})}, {2, 20, view_of({{1, 10}, {2, 20}, {3, 30}})}}), 2});
  // Incomparable views.
  out.push_back({"containment", "is",
                 hand_trace(3, 2, {{1, 10, view_of({{1, 10}, {2, 20}})}, {2, 20, view_of({{2, 20}, {3, 30}})},
                                   {3, 30, view_of({{1, 10}, {2, 20}, {3, 30}})}}), 2});
  // p2 is seen by p1, yet p2 saw more than p1.
  out.push_back({"immediacy", "is",
                 hand_trace(3, 2, {{1, 10, view_of({{1, 10}, {2, 20}})}, {2, 20, view_of({{1, 10}, {2, 20}, {3, 30}})},
                                   {3, 30, view_of({{1, 10}, {2, 20}, {3, 30}})}}), 2});
  // n=3, k=1 needs two pairs.
  out.push_back({"output_size", "is",
                 hand_trace(3, 1, {{1, 10, view_of({{1, 10}})}, {2, 20, view_of({{1, 10}, {2, 20}})}}), 1});
  // p2 is in the smallest view but returned a strictly larger one.
  out.push_back({"theorem1", "theorem1",
                 hand_trace(3, 1, {{1, 10, view_of({{1, 10}, {2, 20}})}, {2, 20, view_of({{1, 10}, {2, 20}, {3, 30}})},
                                   {3, 30, view_of({{1, 10}, {2, 20}, {3, 30}})}}), 1});
  return out;
}

inline CheckReport run_negative(const NegativeCase& c) {
  const int n = c.trace.config.n;
  return c.check == "theorem1" ? check_theorem1(c.trace, "kis", n, c.k) : check_is(c.trace, "kis", c.k);
}

}  // namespace kis::test
