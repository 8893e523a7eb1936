#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kis/routines.hpp"
#include "kis/world.hpp"

namespace kis {

/// Agreement reachable with one k-IS object and registers in the t-crash
/// model: max(1, t+k-(n-2)). Requires 1 <= t <= k <= n-1.
int xsa_bound(int n, int t, int k);

/// Value-semantic owning pointer for polymorphic members of copyable programs.
template <class T>
class ClonePtr {
 public:
  ClonePtr() = default;
  explicit ClonePtr(std::unique_ptr<T> p) : p_(std::move(p)) {}
  ClonePtr(const ClonePtr& o) : p_(o.p_ ? o.p_->clone() : nullptr) {}
  ClonePtr& operator=(const ClonePtr& o) {
    if (this != &o) p_ = o.p_ ? o.p_->clone() : nullptr;
    return *this;
  }
  ClonePtr(ClonePtr&&) noexcept = default;
  ClonePtr& operator=(ClonePtr&&) noexcept = default;

  T* operator->() const { return p_.get(); }
  T& operator*() const { return *p_; }
  explicit operator bool() const { return static_cast<bool>(p_); }

 private:
  std::unique_ptr<T> p_;
};

// ---------------------------------------------------------------------------
// alg1: x-set agreement from one k-IS object and an array VIEW.

/// Picks the smallest (by cardinality) of the given views and returns its
/// minimum value. Equal-cardinality views must coincide.
Value decide_from_smallest(std::span<const View> views);

template <class Backend>
class Alg1Program : public ClonableProgram<Alg1Program<Backend>> {
 public:
  Alg1Program(Backend backend, ObjectRef<ValueRegisters> views, ProcessId self, Value input, int n, int t)
      : backend_(std::move(backend)), views_(views), input_(std::move(input)),
        collector_(views, n, self), need_(static_cast<std::size_t>(n - t)) {}

  void step(StepContext& ctx) override {
    switch (phase_) {
      case Phase::start:
        ctx.invoke("alg1", "propose", input_);
        phase_ = Phase::snapshot;
        [[fallthrough]];
      case Phase::snapshot:
        if (auto v = backend_.step(ctx)) {
          view_ = std::move(*v);
          phase_ = Phase::publish;
        }
        return;
      case Phase::publish:
        ctx.write(views_, Value(view_));
        collector_.set_own(Value(view_));
        phase_ = Phase::collect;
        if (collector_.known() >= need_) {
          decide(ctx);
        } else {
          collector_.begin_pass();
        }
        return;
      case Phase::collect:
        if (collector_.pass_done()) collector_.begin_pass();
        collector_.read_next(ctx);
        if (collector_.known() >= need_) {
          decide(ctx);
        } else if (collector_.pass_done()) {
          collector_.park(ctx);
        }
        return;
      case Phase::done: break;
    }
    throw ModelError("alg1 program stepped after returning");
  }

  void hash_into(StateHasher& h) const override {
    h.add(static_cast<std::uint64_t>(phase_)).add(view_.hash());
    backend_.hash_into(h);
    collector_.hash_into(h);
  }

 private:
  enum class Phase : std::uint8_t { start, snapshot, publish, collect, done };

  void decide(StepContext& ctx) {
    std::vector<View> views;
    for (const auto& c : collector_.seen()) {
      if (c) views.push_back(c->as_view());
    }
    Value v = decide_from_smallest(views);
    ctx.respond("alg1", "propose", v);
    ctx.finish(v);
    phase_ = Phase::done;
  }

  Backend backend_;
  ObjectRef<ValueRegisters> views_;
  Value input_;
  WriteOnceCollector collector_;
  std::size_t need_;
  Phase phase_ = Phase::start;
  View view_;
};

// ---------------------------------------------------------------------------
// Protocols over k-IS objects only (step alphabet: write_snapshot, local,
// decide). Used directly over oracles and inside the two-simulator run.

struct ProtocolOp {
  enum class Kind : std::uint8_t { write_snapshot, local, decide };
  Kind kind = Kind::local;
  std::size_t object = 0;
  Value value = 0;
};

class KisProtocol {
 public:
  virtual ~KisProtocol() = default;
  virtual std::unique_ptr<KisProtocol> clone() const = 0;
  virtual std::string_view name() const = 0;
  virtual std::size_t object_count() const = 0;
  virtual bool done() const = 0;
  virtual ProtocolOp next() const = 0;
  /// Consumes the result of the op returned by next(); the view is present
  /// exactly for write_snapshot.
  virtual void complete(const std::optional<View>& result) = 0;
  virtual void hash_into(StateHasher& h) const = 0;
};

/// alg1 with VIEW replaced by a second k-IS object: snapshot the
/// input on object 0, snapshot the obtained view on object 1, decide the
/// minimum of the smallest view inside the second result.
class Alg1VariantProtocol : public KisProtocol {
 public:
  explicit Alg1VariantProtocol(Value input) : input_(std::move(input)) {}

  std::unique_ptr<KisProtocol> clone() const override { return std::make_unique<Alg1VariantProtocol>(*this); }
  std::string_view name() const override { return "alg1v"; }
  std::size_t object_count() const override { return 2; }
  bool done() const override { return stage_ == 3; }
  ProtocolOp next() const override;
  void complete(const std::optional<View>& result) override;
  void hash_into(StateHasher& h) const override;

 private:
  Value input_;
  int stage_ = 0;
  View first_;
  View second_;
  std::optional<Value> decision_;
};

/// Runs a KisProtocol as a process program over k-IS oracles.
class KisProtocolProgram : public ClonableProgram<KisProtocolProgram> {
 public:
  KisProtocolProgram(std::unique_ptr<KisProtocol> protocol, std::vector<ObjectRef<KisOracle>> objects, Value input);

  void step(StepContext& ctx) override;
  void hash_into(StateHasher& h) const override;

 private:
  ClonePtr<KisProtocol> protocol_;
  std::vector<ObjectRef<KisOracle>> objects_;
  Value input_;
  bool started_ = false;
  bool waiting_ = false;
};

// ---------------------------------------------------------------------------
// alg2: k-IS from registers, one consensus object and one immediate
// snapshot.

struct Alg2Objects {
  /// Label of the k-IS operation's invoke/respond events.
  std::string name;
  ObjectRef<ValueRegisters> reg;
  ObjectRef<ConsensusOracle> cs;
  ObjectRef<LevelRegisters> is;
  std::string is_name;
};

class Alg2Routine {
 public:
  Alg2Routine(Alg2Objects objects, ProcessId self, Value v, int n, int k);

  std::optional<View> step(StepContext& ctx);
  void hash_into(StateHasher& h) const;

 private:
  enum class Phase : std::uint8_t { start, wait, collect, propose, snapshot, done };

  std::optional<View> finish(StepContext& ctx, View view);

  Alg2Objects objects_;
  ProcessId self_;
  Value value_;
  std::size_t need_;
  WriteOnceCollector collector_;
  Phase phase_ = Phase::start;
  View decided_;
  std::optional<ImmediateSnapshotRoutine> snapshot_;
};

class Alg2Program : public ClonableProgram<Alg2Program> {
 public:
  explicit Alg2Program(Alg2Routine routine) : routine_(std::move(routine)) {}
  void step(StepContext& ctx) override;
  void hash_into(StateHasher& h) const override { routine_.hash_into(h); }

 private:
  Alg2Routine routine_;
};

// ---------------------------------------------------------------------------
// Naive read/write attempt at k-IS: write, wait for n-k cells, return them.
// Blocks forever once more than k processes crashed initially.

class NaiveKisProgram : public ClonableProgram<NaiveKisProgram> {
 public:
  NaiveKisProgram(ObjectRef<ValueRegisters> reg, ProcessId self, Value v, int n, int k);

  void step(StepContext& ctx) override;
  void hash_into(StateHasher& h) const override;

 private:
  void finish(StepContext& ctx);

  ObjectRef<ValueRegisters> reg_;
  Value value_;
  std::size_t need_;
  WriteOnceCollector collector_;
  bool started_ = false;
};

/// Invokes the k-IS oracle once and returns the view.
class OracleKisProgram : public ClonableProgram<OracleKisProgram> {
 public:
  OracleKisProgram(ObjectRef<KisOracle> obj, Value v) : call_(obj, std::move(v)) {}
  void step(StepContext& ctx) override {
    if (auto v = call_.step(ctx)) ctx.finish(Value(*v));
  }
  void hash_into(StateHasher& h) const override { call_.hash_into(h); }

 private:
  OracleKisCall call_;
};

/// The alg1 analysis with n-k collected views instead of n-t: the variant's
/// second object only guarantees n-k of them.
int alg1_variant_bound(int n, int k);

// ---------------------------------------------------------------------------
// Instances.

enum class Algorithm : std::uint8_t { alg1, alg1v, alg2, naive, is, alg1_over_alg2, kis };

Algorithm parse_algorithm(std::string_view tag);
std::string_view algorithm_tag(Algorithm a);
/// Object name of the top-level operation's invoke/respond events.
std::string_view top_level_object(Algorithm a);

std::vector<std::int64_t> default_inputs(int n);

/// Builds a fresh world running `a` at every process. Objects: alg1 uses
/// "kis" and "VIEW"; alg1v uses "kis1" and "kis2"; alg2 uses "REG", "cs" and
/// "is"; naive uses "REG"; is uses "is"; alg1_over_alg2 nests alg2 under alg1;
/// kis is the bare oracle "kis".
World make_instance(Algorithm a, const ModelConfig& config, std::span<const std::int64_t> inputs);

}  // namespace kis
