#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "kis/reductions.hpp"
#include "kis/world.hpp"

namespace kis {

/// Split of the simulated processes between simulators Q0 and Q1; D holds the
/// processes that are initially crashed in the simulated run.
struct Partition {
  std::vector<ProcessId> a0;
  std::vector<ProcessId> a1;
  std::vector<ProcessId> d;

  const std::vector<ProcessId>& side(int i) const { return i == 0 ? a0 : a1; }
  /// Disjoint cover of 1..n with |A0| = |A1| >= 1.
  void validate(int n) const;
  std::string to_string() const;

  /// "1,2|3,4|" style: A0, A1 and D separated by '|'; D may be omitted.
  static Partition parse(std::string_view text);
  /// n = 2t: halves. 2t > n: |A0| = |A1| = n-t, the remaining 2t-n in D.
  static Partition standard(int n, int t);
};

using ProtocolFactory = std::function<std::unique_ptr<KisProtocol>(Value input)>;

/// The inner algorithm's description as the simulators see it.
struct InnerSpec {
  ModelConfig config;  // n, t, k of the simulated system
  ProtocolFactory factory;
  std::string name;                       // top-level label, e.g. "alg1v"
  std::vector<std::string> object_names;  // one per k-IS object
};

InnerSpec alg1_variant_inner(const ModelConfig& inner);

/// Q_i's program: round-robin simulation of the members of A_i.
class SimulatorProgram : public ClonableProgram<SimulatorProgram> {
 public:
  struct Objects {
    std::vector<ObjectRef<ValueRegisters>> reg;  // REG[.][o], cell q is written by Q_q
    std::vector<ObjectRef<KisOracle>> is;        // IS[o], 1-IS between the simulators
  };

  SimulatorProgram(int side, const InnerSpec& inner, const Partition& partition, Objects objects, Value input);

  void step(StepContext& ctx) override;
  void hash_into(StateHasher& h) const override;

 private:
  struct Member {
    ProcessId pid;
    ClonePtr<KisProtocol> protocol;
    bool started = false;
    bool done = false;
    std::uint64_t answers = 0;  // running digest of the views handed to it
  };
  enum class Stage : std::uint8_t { body, adopt, snapshot_invoke, snapshot_wait };

  ProcessId other() const { return ProcessId{side_ == 0 ? 2 : 1}; }
  std::string label(std::size_t o) const;
  void body(StepContext& ctx);
  void answer(StepContext& ctx, Member& m, std::size_t o, const View& view);
  /// Once every member has a pair in prop(o), schedules the IS access for o.
  bool maybe_snapshot(std::size_t o);
  void end_body(StepContext& ctx, bool progress);

  int side_;
  std::string name_;
  std::vector<std::string> object_names_;
  Objects objects_;
  Value input_;
  std::vector<Member> members_;
  std::size_t cursor_ = 0;
  Stage stage_ = Stage::body;
  std::size_t stage_object_ = 0;
  View stage_view_;
  std::vector<View> prop_;
  std::vector<std::optional<View>> mine_;
  std::size_t idle_ = 0;
  std::vector<bool> idle_watch_;
  std::optional<Value> decision_;
  bool started_ = false;
};

struct SimulationSetup {
  InnerSpec inner;
  Partition partition;
  World outer;
};

/// Outer world of two simulators (n=2, t=1, k=1) with REG/<o> and IS/<o> per
/// simulated object; `inputs` are the initial values of Q0 and Q1.
SimulationSetup make_simulation(InnerSpec inner, Partition partition, std::array<std::int64_t, 2> inputs,
                                std::uint64_t seed = 0, std::size_t step_bound = 100000);

struct Lemma1Report {
  std::string object;
  bool has_response = false;
  int max_inside = 0;
  /// Vacuous when no response exists on the object.
  bool witness = true;
};

struct SimulatedRun {
  Trace inner;
  std::vector<Lemma1Report> lemma1;  // one per simulated k-IS object
};

/// Rebuilds the simulated processes' history from the outer trace: their
/// invoke/respond events, crash events for D at the start and for A_i when
/// Q_i crashes, and per-process outcomes.
SimulatedRun extract_simulated_history(const Trace& outer, const SimulationSetup& setup);

/// Largest number of processes simultaneously inside `object` (invoked, not
/// yet responded, not crashed).
int max_inside(const Trace& trace, std::string_view object);

}  // namespace kis
