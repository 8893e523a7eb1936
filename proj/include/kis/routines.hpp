#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kis/world.hpp"

namespace kis {

/// Collects a register array whose cells are written at most once. A pass
/// reads, one per transition, every foreign cell still seen as bottom; cells
/// already seen non-bottom cannot change and are skipped.
class WriteOnceCollector {
 public:
  WriteOnceCollector(ObjectRef<ValueRegisters> regs, int n, ProcessId self);

  void set_own(Value v);
  std::size_t known() const { return known_; }
  const std::vector<std::optional<Value>>& seen() const { return seen_; }
  /// Pairs (j, value) for every cell seen non-bottom.
  View seen_view() const;

  void begin_pass();
  bool pass_done() const { return cursor_ > static_cast<int>(seen_.size()); }
  void read_next(StepContext& ctx);
  /// Watches every cell still seen as bottom, then parks.
  void park(StepContext& ctx) const;

  void hash_into(StateHasher& h) const;

 private:
  void advance();

  ObjectRef<ValueRegisters> regs_;
  ProcessId self_;
  std::vector<std::optional<Value>> seen_;
  std::size_t known_ = 0;
  int cursor_ = 1;
};

/// Wait-free one-shot immediate snapshot over SWMR registers (level-based).
/// Descends from level n; at level l it writes (value, l), collects, and
/// returns the pairs at level <= l once there are exactly l of them.
class ImmediateSnapshotRoutine {
 public:
  ImmediateSnapshotRoutine(ObjectRef<LevelRegisters> regs, std::string name, Value v);

  /// One transition; yields the view once complete.
  std::optional<View> step(StepContext& ctx);
  int level() const { return level_; }
  void hash_into(StateHasher& h) const;

 private:
  enum class Phase : std::uint8_t { start, write, collect, done };

  void write_level(StepContext& ctx);
  std::optional<View> evaluate(StepContext& ctx);
  void advance(const StepContext& ctx);

  ObjectRef<LevelRegisters> regs_;
  std::string name_;
  Value value_;
  Phase phase_ = Phase::start;
  int level_ = 0;
  int cursor_ = 1;
  std::vector<Pair> below_;
};

/// write_snapshot_k through the set-linearizable oracle: invoke, then pick up
/// the response once the adversary committed it.
class OracleKisCall {
 public:
  OracleKisCall(ObjectRef<KisOracle> obj, Value v) : obj_(obj), value_(std::move(v)) {}

  std::optional<View> step(StepContext& ctx);
  void hash_into(StateHasher& h) const { h.add(invoked_ ? 1 : 0); }

 private:
  ObjectRef<KisOracle> obj_;
  Value value_;
  bool invoked_ = false;
};

class ImmediateSnapshotProgram : public ClonableProgram<ImmediateSnapshotProgram> {
 public:
  ImmediateSnapshotProgram(ObjectRef<LevelRegisters> regs, std::string name, Value v)
      : routine_(regs, std::move(name), std::move(v)) {}

  void step(StepContext& ctx) override;
  void hash_into(StateHasher& h) const override { routine_.hash_into(h); }

 private:
  ImmediateSnapshotRoutine routine_;
};

}  // namespace kis
