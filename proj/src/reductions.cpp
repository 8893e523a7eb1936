#include "kis/reductions.hpp"

#include <algorithm>
#include <array>

namespace kis {

int xsa_bound(int n, int t, int k) {
  if (!(1 <= t && t <= k && k <= n - 1)) {
    throw ModelError("xsa_bound needs 1 <= t <= k <= n-1");
  }
  return std::max(1, t + k - (n - 2));
}

int alg1_variant_bound(int n, int k) {
  if (!(1 <= k && k <= n - 1)) throw ModelError("alg1_variant_bound needs 1 <= k <= n-1");
  return std::max(1, 2 * k - (n - 2));
}

Value decide_from_smallest(std::span<const View> views) {
  if (views.empty()) throw ModelError("no views to decide from");
  const View* best = &views[0];
  for (const auto& v : views) {
    if (v.size() < best->size()) best = &v;
  }
  for (const auto& v : views) {
    if (v.size() == best->size() && v != *best) {
      throw ModelError("two distinct views of the same size: " + to_string(v) + " vs " + to_string(*best));
    }
  }
  return best->min_value();
}

// ---------------------------------------------------------------------------

ProtocolOp Alg1VariantProtocol::next() const {
  switch (stage_) {
    case 0: return {ProtocolOp::Kind::write_snapshot, 0, input_};
    case 1: return {ProtocolOp::Kind::write_snapshot, 1, Value(first_)};
    case 2: return {ProtocolOp::Kind::decide, 0, *decision_};
    default: throw ModelError("protocol already decided");
  }
}

void Alg1VariantProtocol::complete(const std::optional<View>& result) {
  switch (stage_) {
    case 0:
      if (!result) throw ModelError("write_snapshot completed without a view");
      first_ = *result;
      break;
    case 1: {
      if (!result) throw ModelError("write_snapshot completed without a view");
      second_ = *result;
      std::vector<View> inner;
      for (const auto& p : second_) inner.push_back(p.value.as_view());
      decision_ = decide_from_smallest(inner);
      break;
    }
    case 2: break;
    default: throw ModelError("protocol already decided");
  }
  ++stage_;
}

void Alg1VariantProtocol::hash_into(StateHasher& h) const {
  h.add(static_cast<std::uint64_t>(stage_)).add(input_.hash()).add(first_.hash()).add(second_.hash());
  h.add(decision_ ? decision_->hash() : 0);
}

KisProtocolProgram::KisProtocolProgram(std::unique_ptr<KisProtocol> protocol, std::vector<ObjectRef<KisOracle>> objects,
                                       Value input)
    : protocol_(std::move(protocol)), objects_(std::move(objects)), input_(std::move(input)) {
  if (objects_.size() != protocol_->object_count()) throw ModelError("protocol object count mismatch");
}

void KisProtocolProgram::step(StepContext& ctx) {
  const std::string label(protocol_->name());
  if (!started_) {
    started_ = true;
    ctx.invoke(label, "propose", input_);
  }
  if (waiting_) {
    waiting_ = false;
    protocol_->complete(ctx.take_response());
  }
  while (!protocol_->done()) {
    ProtocolOp op = protocol_->next();
    switch (op.kind) {
      case ProtocolOp::Kind::write_snapshot:
        ctx.kis_invoke(objects_.at(op.object), op.value);
        waiting_ = true;
        return;
      case ProtocolOp::Kind::local:
        protocol_->complete(std::nullopt);
        break;
      case ProtocolOp::Kind::decide:
        protocol_->complete(std::nullopt);
        ctx.respond(label, "propose", op.value);
        ctx.finish(op.value);
        return;
    }
  }
  throw ModelError("protocol finished without deciding");
}

void KisProtocolProgram::hash_into(StateHasher& h) const {
  h.add(started_ ? 1 : 0).add(waiting_ ? 1 : 0);
  protocol_->hash_into(h);
}

// ---------------------------------------------------------------------------

Alg2Routine::Alg2Routine(Alg2Objects objects, ProcessId self, Value v, int n, int k)
    : objects_(std::move(objects)), self_(self), value_(std::move(v)),
      need_(static_cast<std::size_t>(n - k)), collector_(objects_.reg, n, self) {}

std::optional<View> Alg2Routine::finish(StepContext& ctx, View view) {
  ctx.respond(objects_.name, "write_snapshot_k", Value(view));
  phase_ = Phase::done;
  return view;
}

std::optional<View> Alg2Routine::step(StepContext& ctx) {
  switch (phase_) {
    case Phase::start:
      ctx.invoke(objects_.name, "write_snapshot_k", value_);
      ctx.write(objects_.reg, value_);
      collector_.set_own(value_);
      collector_.begin_pass();
      phase_ = collector_.known() >= need_ ? Phase::collect : Phase::wait;
      return std::nullopt;
    case Phase::wait:
      if (collector_.pass_done()) collector_.begin_pass();
      collector_.read_next(ctx);
      if (collector_.known() >= need_) {
        phase_ = Phase::collect;
        collector_.begin_pass();
      } else if (collector_.pass_done()) {
        collector_.park(ctx);
      }
      return std::nullopt;
    case Phase::collect:
      // One more collect after the wait; cells already seen cannot change.
      if (collector_.pass_done()) {
        phase_ = Phase::propose;
        return std::nullopt;
      }
      collector_.read_next(ctx);
      if (collector_.pass_done()) phase_ = Phase::propose;
      return std::nullopt;
    case Phase::propose: {
      decided_ = ctx.propose(objects_.cs, Value(collector_.seen_view())).as_view();
      if (decided_.contains(Pair{self_, value_})) return finish(ctx, decided_);
      phase_ = Phase::snapshot;
      snapshot_.emplace(objects_.is, objects_.is_name, value_);
      return std::nullopt;
    }
    case Phase::snapshot:
      if (auto r = snapshot_->step(ctx)) return finish(ctx, decided_.united(*r));
      return std::nullopt;
    case Phase::done: break;
  }
  throw ModelError("k-IS routine stepped after returning");
}

void Alg2Routine::hash_into(StateHasher& h) const {
  h.add(static_cast<std::uint64_t>(phase_)).add(decided_.hash());
  collector_.hash_into(h);
  if (snapshot_) snapshot_->hash_into(h);
}

void Alg2Program::step(StepContext& ctx) {
  if (auto v = routine_.step(ctx)) ctx.finish(Value(*v));
}

// ---------------------------------------------------------------------------

NaiveKisProgram::NaiveKisProgram(ObjectRef<ValueRegisters> reg, ProcessId self, Value v, int n, int k)
    : reg_(reg), value_(std::move(v)), need_(static_cast<std::size_t>(n - k)), collector_(reg, n, self) {}

void NaiveKisProgram::finish(StepContext& ctx) {
  View view = collector_.seen_view();
  ctx.respond("naive", "write_snapshot_k", Value(view));
  ctx.finish(Value(view));
}

void NaiveKisProgram::step(StepContext& ctx) {
  if (!started_) {
    started_ = true;
    ctx.invoke("naive", "write_snapshot_k", value_);
    ctx.write(reg_, value_);
    collector_.set_own(value_);
    collector_.begin_pass();
    if (collector_.known() >= need_) finish(ctx);
    return;
  }
  if (collector_.pass_done()) collector_.begin_pass();
  collector_.read_next(ctx);
  if (collector_.known() >= need_) {
    finish(ctx);
  } else if (collector_.pass_done()) {
    collector_.park(ctx);
  }
}

void NaiveKisProgram::hash_into(StateHasher& h) const {
  h.add(started_ ? 1 : 0);
  collector_.hash_into(h);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 7> kTags{{
    {Algorithm::alg1, "alg1"},
    {Algorithm::alg1v, "alg1v"},
    {Algorithm::alg2, "alg2"},
    {Algorithm::naive, "naive"},
    {Algorithm::is, "is"},
    {Algorithm::alg1_over_alg2, "alg1-over-alg2"},
    {Algorithm::kis, "kis"},
}};

}  // namespace

Algorithm parse_algorithm(std::string_view tag) {
  if (tag == "alg1_variant") return Algorithm::alg1v;
  if (tag == "alg1_over_alg2") return Algorithm::alg1_over_alg2;
  for (const auto& [a, s] : kTags) {
    if (s == tag) return a;
  }
  throw ModelError("unknown algorithm '" + std::string(tag) + "'");
}

std::string_view algorithm_tag(Algorithm a) {
  for (const auto& [b, s] : kTags) {
    if (a == b) return s;
  }
  return "?";
}

std::string_view top_level_object(Algorithm a) {
  switch (a) {
    case Algorithm::alg1:
    case Algorithm::alg1_over_alg2: return "alg1";
    case Algorithm::alg1v: return "alg1v";
    case Algorithm::alg2: return "alg2";
    case Algorithm::naive: return "naive";
    case Algorithm::is: return "is";
    case Algorithm::kis: return "kis";
  }
  return "?";
}

std::vector<std::int64_t> default_inputs(int n) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i + 1;
  return v;
}

World make_instance(Algorithm a, const ModelConfig& config, std::span<const std::int64_t> inputs) {
  const int n = config.n;
  if (static_cast<int>(inputs.size()) != n) throw ModelError("need exactly n inputs");
  World w(config);
  auto input = [&](int i) { return Value(inputs[static_cast<std::size_t>(i - 1)]); };
  switch (a) {
    case Algorithm::alg1: {
      auto kis = w.add_object("kis", KisOracle(n, config.k));
      auto view = w.add_object("VIEW", ValueRegisters(n));
      for (int i = 1; i <= n; ++i) {
        w.add_process(std::make_unique<Alg1Program<OracleKisCall>>(OracleKisCall(kis, input(i)), view, ProcessId{i},
                                                                   input(i), n, config.t));
      }
      break;
    }
    case Algorithm::alg1v: {
      std::vector<ObjectRef<KisOracle>> objs{w.add_object("kis1", KisOracle(n, config.k)),
                                             w.add_object("kis2", KisOracle(n, config.k))};
      for (int i = 1; i <= n; ++i) {
        w.add_process(
            std::make_unique<KisProtocolProgram>(std::make_unique<Alg1VariantProtocol>(input(i)), objs, input(i)));
      }
      break;
    }
    case Algorithm::alg2:
    case Algorithm::alg1_over_alg2: {
      Alg2Objects objs{"alg2", w.add_object("REG", ValueRegisters(n)), w.add_object("cs", ConsensusOracle()),
                       w.add_object("is", LevelRegisters(n)), "is"};
      if (a == Algorithm::alg2) {
        for (int i = 1; i <= n; ++i) {
          w.add_process(std::make_unique<Alg2Program>(Alg2Routine(objs, ProcessId{i}, input(i), n, config.k)));
        }
      } else {
        auto view = w.add_object("VIEW", ValueRegisters(n));
        for (int i = 1; i <= n; ++i) {
          w.add_process(std::make_unique<Alg1Program<Alg2Routine>>(Alg2Routine(objs, ProcessId{i}, input(i), n, config.k),
                                                                   view, ProcessId{i}, input(i), n, config.t));
        }
      }
      break;
    }
    case Algorithm::naive: {
      auto reg = w.add_object("REG", ValueRegisters(n));
      for (int i = 1; i <= n; ++i) {
        w.add_process(std::make_unique<NaiveKisProgram>(reg, ProcessId{i}, input(i), n, config.k));
      }
      break;
    }
    case Algorithm::kis: {
      auto kis = w.add_object("kis", KisOracle(n, config.k));
      for (int i = 1; i <= n; ++i) w.add_process(std::make_unique<OracleKisProgram>(kis, input(i)));
      break;
    }
    case Algorithm::is: {
      auto regs = w.add_object("is", LevelRegisters(n));
      for (int i = 1; i <= n; ++i) w.add_process(std::make_unique<ImmediateSnapshotProgram>(regs, "is", input(i)));
      break;
    }
  }
  return w;
}

}  // namespace kis
