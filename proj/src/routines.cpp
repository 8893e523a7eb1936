#include "kis/routines.hpp"

namespace kis {

WriteOnceCollector::WriteOnceCollector(ObjectRef<ValueRegisters> regs, int n, ProcessId self)
    : regs_(regs), self_(self), seen_(static_cast<std::size_t>(n)), cursor_(n + 1) {}

void WriteOnceCollector::set_own(Value v) {
  auto& cell = seen_.at(static_cast<std::size_t>(self_.index - 1));
  if (!cell) ++known_;
  cell = std::move(v);
}

View WriteOnceCollector::seen_view() const {
  std::vector<Pair> ps;
  for (std::size_t i = 0; i < seen_.size(); ++i) {
    if (seen_[i]) ps.push_back(Pair{ProcessId{static_cast<int>(i) + 1}, *seen_[i]});
  }
  return View(std::move(ps));
}

void WriteOnceCollector::advance() {
  const int n = static_cast<int>(seen_.size());
  while (cursor_ <= n && (cursor_ == self_.index || seen_[static_cast<std::size_t>(cursor_ - 1)])) ++cursor_;
}

void WriteOnceCollector::begin_pass() {
  cursor_ = 1;
  advance();
}

void WriteOnceCollector::read_next(StepContext& ctx) {
  if (pass_done()) throw ModelError("collector read past the end of its pass");
  auto v = ctx.read(regs_, ProcessId{cursor_});
  if (v) {
    seen_[static_cast<std::size_t>(cursor_ - 1)] = std::move(v);
    ++known_;
  }
  ++cursor_;
  advance();
}

void WriteOnceCollector::park(StepContext& ctx) const {
  for (std::size_t i = 0; i < seen_.size(); ++i) {
    if (!seen_[i]) ctx.watch(regs_, ProcessId{static_cast<int>(i) + 1}, std::optional<Value>());
  }
  ctx.park();
}

void WriteOnceCollector::hash_into(StateHasher& h) const {
  h.add(static_cast<std::uint64_t>(cursor_));
  for (const auto& c : seen_) h.add(c ? c->hash() : 0);
}

ImmediateSnapshotRoutine::ImmediateSnapshotRoutine(ObjectRef<LevelRegisters> regs, std::string name, Value v)
    : regs_(regs), name_(std::move(name)), value_(std::move(v)) {}

void ImmediateSnapshotRoutine::advance(const StepContext& ctx) {
  if (cursor_ == ctx.self().index) ++cursor_;
}

void ImmediateSnapshotRoutine::write_level(StepContext& ctx) {
  ctx.write(regs_, LevelCell{value_, level_});
  below_.clear();
  cursor_ = 1;
  advance(ctx);
  phase_ = Phase::collect;
}

std::optional<View> ImmediateSnapshotRoutine::evaluate(StepContext& ctx) {
  std::vector<Pair> s = below_;
  s.push_back(Pair{ctx.self(), value_});
  const int size = static_cast<int>(s.size());
  if (size > level_) throw ModelError("immediate snapshot saw more processes than its level");
  if (size == level_) {
    View view(std::move(s));
    ctx.respond(name_, "write_snapshot", Value(view));
    phase_ = Phase::done;
    return view;
  }
  --level_;
  phase_ = Phase::write;
  return std::nullopt;
}

std::optional<View> ImmediateSnapshotRoutine::step(StepContext& ctx) {
  switch (phase_) {
    case Phase::start:
      ctx.invoke(name_, "write_snapshot", value_);
      level_ = ctx.n();
      write_level(ctx);
      if (cursor_ > ctx.n()) return evaluate(ctx);
      return std::nullopt;
    case Phase::write:
      write_level(ctx);
      if (cursor_ > ctx.n()) return evaluate(ctx);
      return std::nullopt;
    case Phase::collect: {
      auto cell = ctx.read(regs_, ProcessId{cursor_});
      if (cell && cell->level <= level_) below_.push_back(Pair{ProcessId{cursor_}, cell->value});
      ++cursor_;
      advance(ctx);
      if (cursor_ > ctx.n()) return evaluate(ctx);
      return std::nullopt;
    }
    case Phase::done: break;
  }
  throw ModelError("immediate snapshot invoked twice");
}

void ImmediateSnapshotRoutine::hash_into(StateHasher& h) const {
  h.add(static_cast<std::uint64_t>(phase_)).add(static_cast<std::uint64_t>(level_));
  h.add(static_cast<std::uint64_t>(cursor_)).add(below_.size());
  for (const auto& p : below_) h.add(static_cast<std::uint64_t>(p.pid.index)).add(p.value.hash());
}

std::optional<View> OracleKisCall::step(StepContext& ctx) {
  if (!invoked_) {
    invoked_ = true;
    ctx.kis_invoke(obj_, value_);
    return std::nullopt;
  }
  return ctx.take_response();
}

void ImmediateSnapshotProgram::step(StepContext& ctx) {
  if (auto view = routine_.step(ctx)) ctx.finish(Value(*view));
}

}  // namespace kis
