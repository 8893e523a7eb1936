#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kis/hash.hpp"
#include "kis/model.hpp"
#include "kis/objects.hpp"

namespace kis {

using SharedObject = std::variant<ValueRegisters, LevelRegisters, KisOracle, ConsensusOracle>;

/// Typed index of an object inside a World.
template <class T>
struct ObjectRef {
  std::size_t index = 0;
};

class StepContext;

/// Per-process step program. Implementations are plain state machines so a
/// World can be copied at every branch point of an exhaustive search.
class Program {
 public:
  virtual ~Program() = default;
  virtual std::unique_ptr<Program> clone() const = 0;
  /// One transition: at most one shared action plus local computation. The
  /// simulator keeps calling step() within a scheduler step until a shared
  /// action happened or the process stopped running.
  virtual void step(StepContext& ctx) = 0;
  virtual void hash_into(StateHasher& h) const = 0;
};

template <class Derived>
class ClonableProgram : public Program {
 public:
  std::unique_ptr<Program> clone() const override {
    return std::make_unique<Derived>(static_cast<const Derived&>(*this));
  }
};

/// Deterministic step-level simulator state: n processes, shared objects and
/// the event log of the run so far.
class World {
 public:
  explicit World(ModelConfig config);
  World(const World& other);
  World& operator=(const World& other);
  World(World&&) noexcept = default;
  World& operator=(World&&) noexcept = default;
  ~World() = default;

  template <class T>
  ObjectRef<T> add_object(std::string name, T object) {
    objects_.emplace_back(std::move(object));
    names_.push_back(std::move(name));
    return ObjectRef<T>{objects_.size() - 1};
  }
  ProcessId add_process(std::unique_ptr<Program> program);

  const ModelConfig& config() const { return config_; }
  int process_count() const { return static_cast<int>(procs_.size()); }
  std::size_t object_count() const { return objects_.size(); }
  const std::string& object_name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> find_object(std::string_view name) const;
  const SharedObject& object_at(std::size_t i) const { return objects_.at(i); }
  template <class T>
  const T& object(ObjectRef<T> ref) const {
    return std::get<T>(objects_.at(ref.index));
  }

  const Outcome& outcome(ProcessId p) const { return slot(p).outcome; }
  bool crashed(ProcessId p) const { return slot(p).outcome.status == ProcessStatus::crashed; }
  int crash_count() const { return crashes_; }
  std::size_t steps() const { return steps_; }
  bool finished() const { return finished_; }
  int inside_peak(std::string_view label) const;

  /// Every action the adversary may take now. Commits are expanded to every
  /// feasible batch when `expand_commits`, otherwise one placeholder per object.
  std::vector<Action> enabled_actions(bool expand_commits) const;
  /// True iff some process step or commit is enabled (crashes alone do not
  /// count: a state with only crash actions left is quiescent).
  bool has_progress() const;
  bool process_enabled(ProcessId p) const;
  bool is_enabled(const Action& a) const;
  /// Turns a placeholder commit into the whole pending set.
  Action resolve(const Action& a) const;

  void apply(const Action& a);
  /// Marks every running process blocked and closes the run.
  void finish(bool truncated);

  void set_recording(bool on) { recording_ = on; }
  bool recording() const { return recording_; }

  StateDigest digest() const;
  Trace trace() const;

 private:
  friend class StepContext;

  enum class Wait : std::uint8_t { none, response, watch };
  struct Watch {
    std::size_t object;
    ProcessId owner;
    std::uint64_t observed;
  };
  struct ProcessSlot {
    std::unique_ptr<Program> program;
    Wait wait = Wait::none;
    std::optional<View> mailbox;
    std::vector<Watch> watches;
    Outcome outcome;
  };
  struct EventNode {
    Event event;
    std::shared_ptr<const EventNode> prev;
  };
  struct ActionNode {
    Action action;
    std::shared_ptr<const ActionNode> prev;
  };
  struct Inside {
    ProcessId actor;
    ProcessId as;
  };
  struct Occupancy {
    std::string label;
    std::vector<Inside> inside;
    int peak = 0;
  };

  ProcessSlot& slot(ProcessId p) { return procs_.at(static_cast<std::size_t>(p.index - 1)); }
  const ProcessSlot& slot(ProcessId p) const { return procs_.at(static_cast<std::size_t>(p.index - 1)); }
  std::uint64_t cell_digest(std::size_t object, ProcessId owner) const;
  void emit(EventKind kind, std::optional<ProcessId> pid, std::string_view object, std::string_view op,
            Json args, Json ret);
  Occupancy& occupancy(std::string_view label);

  ModelConfig config_;
  std::vector<ProcessSlot> procs_;
  std::vector<SharedObject> objects_;
  std::vector<std::string> names_;
  std::vector<Occupancy> occupancy_;
  std::shared_ptr<const EventNode> events_;
  std::shared_ptr<const ActionNode> schedule_;
  std::uint64_t next_event_ = 0;
  std::size_t steps_ = 0;
  int crashes_ = 0;
  bool truncated_ = false;
  bool finished_ = false;
  bool recording_ = true;
};

/// Capabilities handed to a program during one scheduler step.
class StepContext {
 public:
  StepContext(World& world, ProcessId self) : world_(world), self_(self) {}

  ProcessId self() const { return self_; }
  const ModelConfig& config() const { return world_.config_; }
  int n() const { return world_.config_.n; }
  bool acted() const { return acted_; }

  template <class Cell>
  std::optional<Cell> read(ObjectRef<RegisterArray<Cell>> ref, ProcessId owner) {
    begin_shared();
    const auto& regs = std::get<RegisterArray<Cell>>(world_.objects_.at(ref.index));
    std::optional<Cell> v = regs.read(owner);
    if (world_.recording_) {
      world_.emit(EventKind::reg_read, self_, world_.names_[ref.index], "read", Json(owner.index),
                  v ? to_json(*v) : Json());
    }
    return v;
  }

  /// Writes the caller's own cell.
  template <class Cell>
  void write(ObjectRef<RegisterArray<Cell>> ref, Cell value) {
    begin_shared();
    auto& regs = std::get<RegisterArray<Cell>>(world_.objects_.at(ref.index));
    if (world_.recording_) {
      world_.emit(EventKind::reg_write, self_, world_.names_[ref.index], "write", to_json(value), Json());
    }
    regs.write(self_, std::move(value));
  }

  /// Registers a cell the caller waits on; `observed` is what the caller last
  /// read there.
  template <class Cell>
  void watch(ObjectRef<RegisterArray<Cell>> ref, ProcessId owner, const std::optional<Cell>& observed) {
    world_.slot(self_).watches.push_back({ref.index, owner, observed ? cell_hash(*observed) : 0});
  }
  /// Suspends the caller until some watched cell differs from what it observed.
  void park();

  void kis_invoke(ObjectRef<KisOracle> ref, Value v);
  View take_response();
  Value propose(ObjectRef<ConsensusOracle> ref, Value v);

  /// Operation-level events of the caller's own operations.
  void invoke(std::string_view object, std::string_view op, const Value& arg);
  void respond(std::string_view object, std::string_view op, const Value& ret);
  /// Events of an operation simulated on behalf of another (simulated)
  /// process; tracked for occupancy.
  void invoke_as(ProcessId as, std::string_view object, std::string_view op, const Value& arg);
  void respond_as(ProcessId as, std::string_view object, std::string_view op, const Value& ret);

  void finish(std::optional<Value> result);

 private:
  void begin_shared();

  World& world_;
  ProcessId self_;
  bool acted_ = false;
};

}  // namespace kis
