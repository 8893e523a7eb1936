#include "kis/world.hpp"

#include <algorithm>

namespace kis {

World::World(ModelConfig config) : config_(config) { config_.validate(); }

World::World(const World& other)
    : config_(other.config_),
      objects_(other.objects_),
      names_(other.names_),
      occupancy_(other.occupancy_),
      events_(other.events_),
      schedule_(other.schedule_),
      next_event_(other.next_event_),
      steps_(other.steps_),
      crashes_(other.crashes_),
      truncated_(other.truncated_),
      finished_(other.finished_),
      recording_(other.recording_) {
  procs_.reserve(other.procs_.size());
  for (const auto& s : other.procs_) {
    ProcessSlot c;
    c.program = s.program->clone();
    c.wait = s.wait;
    c.mailbox = s.mailbox;
    c.watches = s.watches;
    c.outcome = s.outcome;
    procs_.push_back(std::move(c));
  }
}

World& World::operator=(const World& other) {
  if (this != &other) {
    World copy(other);
    *this = std::move(copy);
  }
  return *this;
}

ProcessId World::add_process(std::unique_ptr<Program> program) {
  if (process_count() >= config_.n) throw ModelError("more programs than processes");
  ProcessSlot s;
  s.program = std::move(program);
  procs_.push_back(std::move(s));
  return ProcessId{process_count()};
}

std::optional<std::size_t> World::find_object(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

int World::inside_peak(std::string_view label) const {
  for (const auto& o : occupancy_) {
    if (o.label == label) return o.peak;
  }
  return 0;
}

std::uint64_t World::cell_digest(std::size_t object, ProcessId owner) const {
  return std::visit(
      [&](const auto& obj) -> std::uint64_t {
        using T = std::decay_t<decltype(obj)>;
        if constexpr (std::is_same_v<T, ValueRegisters> || std::is_same_v<T, LevelRegisters>) {
          const auto& c = obj.read(owner);
          return c ? cell_hash(*c) : 0;
        } else {
          throw ModelError("watch on a non-register object");
        }
      },
      objects_.at(object));
}

bool World::process_enabled(ProcessId p) const {
  const auto& s = slot(p);
  if (finished_ || s.outcome.status != ProcessStatus::running) return false;
  switch (s.wait) {
    case Wait::none: return true;
    case Wait::response: return false;
    case Wait::watch:
      return std::any_of(s.watches.begin(), s.watches.end(),
                         [&](const Watch& w) { return cell_digest(w.object, w.owner) != w.observed; });
  }
  return false;
}

bool World::has_progress() const {
  if (finished_) return false;
  for (int i = 1; i <= process_count(); ++i) {
    if (process_enabled(ProcessId{i})) return true;
  }
  for (const auto& o : objects_) {
    if (const auto* kis = std::get_if<KisOracle>(&o); kis && kis->can_commit_some()) return true;
  }
  return false;
}

std::vector<Action> World::enabled_actions(bool expand_commits) const {
  std::vector<Action> out;
  if (finished_) return out;
  for (int i = 1; i <= process_count(); ++i) {
    if (process_enabled(ProcessId{i})) out.push_back(Action::step(ProcessId{i}));
  }
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const auto* kis = std::get_if<KisOracle>(&objects_[i]);
    if (kis == nullptr || !kis->can_commit_some()) continue;
    if (expand_commits) {
      for (auto& b : kis->feasible_batches()) out.push_back(Action::commit(i, std::move(b)));
    } else {
      out.push_back(Action::commit(i));
    }
  }
  if (crashes_ < config_.t) {
    for (int i = 1; i <= process_count(); ++i) {
      if (slot(ProcessId{i}).outcome.status == ProcessStatus::running) out.push_back(Action::crash(ProcessId{i}));
    }
  }
  return out;
}

bool World::is_enabled(const Action& a) const {
  if (finished_) return false;
  switch (a.kind) {
    case Action::Kind::step:
      return a.pid.index >= 1 && a.pid.index <= process_count() && process_enabled(a.pid);
    case Action::Kind::crash:
      return a.pid.index >= 1 && a.pid.index <= process_count() && crashes_ < config_.t &&
             slot(a.pid).outcome.status == ProcessStatus::running;
    case Action::Kind::commit: {
      if (a.object >= objects_.size()) return false;
      const auto* kis = std::get_if<KisOracle>(&objects_[a.object]);
      if (kis == nullptr) return false;
      return a.batch.empty() ? kis->can_commit_some() : kis->can_commit(a.batch);
    }
  }
  return false;
}

Action World::resolve(const Action& a) const {
  if (a.kind != Action::Kind::commit || !a.batch.empty()) return a;
  const auto& kis = std::get<KisOracle>(objects_.at(a.object));
  return Action::commit(a.object, kis.pending_pids());
}

void World::emit(EventKind kind, std::optional<ProcessId> pid, std::string_view object, std::string_view op,
                 Json args, Json ret) {
  if (!recording_) return;
  Event e{next_event_++, kind, pid, std::string(object), std::string(op), std::move(args), std::move(ret)};
  events_ = std::make_shared<const EventNode>(EventNode{std::move(e), std::move(events_)});
}

World::Occupancy& World::occupancy(std::string_view label) {
  for (auto& o : occupancy_) {
    if (o.label == label) return o;
  }
  occupancy_.push_back(Occupancy{std::string(label), {}, 0});
  return occupancy_.back();
}

void World::apply(const Action& raw) {
  if (!is_enabled(raw)) throw ModelError("action is not enabled");
  const Action a = resolve(raw);
  ++steps_;
  if (recording_) schedule_ = std::make_shared<const ActionNode>(ActionNode{a, std::move(schedule_)});

  switch (a.kind) {
    case Action::Kind::crash: {
      auto& s = slot(a.pid);
      s.outcome = Outcome{ProcessStatus::crashed, std::nullopt};
      s.watches.clear();
      ++crashes_;
      for (auto& o : occupancy_) {
        std::erase_if(o.inside, [&](const Inside& in) { return in.actor == a.pid; });
      }
      emit(EventKind::crash, a.pid, "", "crash", Json(), Json());
      return;
    }
    case Action::Kind::commit: {
      auto& kis = std::get<KisOracle>(objects_.at(a.object));
      auto released = kis.commit(a.batch, [&](ProcessId p) { return crashed(p); });
      if (recording_) {
        Json batch = Json::array();
        for (ProcessId p : a.batch) batch.push_back(p.index);
        emit(EventKind::commit_batch, std::nullopt, names_[a.object], "commit", std::move(batch), Json());
      }
      for (auto& [pid, view] : released) {
        auto& s = slot(pid);
        if (recording_) emit(EventKind::respond, pid, names_[a.object], "write_snapshot_k", Json(), to_json(view));
        s.mailbox = std::move(view);
        s.wait = Wait::none;
      }
      return;
    }
    case Action::Kind::step: {
      auto& s = slot(a.pid);
      if (s.wait == Wait::watch) {
        s.watches.clear();
        s.wait = Wait::none;
      }
      StepContext ctx(*this, a.pid);
      for (int guard = 0;; ++guard) {
        if (guard > 100000) throw ModelError("program made no shared progress");
        s.program->step(ctx);
        if (ctx.acted() || s.wait != Wait::none || s.outcome.status != ProcessStatus::running) break;
      }
      return;
    }
  }
}

void World::finish(bool truncated) {
  if (finished_) return;
  for (int i = 1; i <= process_count(); ++i) {
    auto& s = slot(ProcessId{i});
    if (s.outcome.status == ProcessStatus::running) {
      s.outcome.status = ProcessStatus::blocked;
      emit(EventKind::blocked, ProcessId{i}, "", "blocked", Json(), Json());
    }
  }
  truncated_ = truncated;
  finished_ = true;
}

StateDigest World::digest() const {
  StateHasher h;
  h.add(static_cast<std::uint64_t>(crashes_));
  for (const auto& s : procs_) {
    h.add(static_cast<std::uint64_t>(s.outcome.status)).add(s.outcome.value ? s.outcome.value->hash() : 0);
    h.add(static_cast<std::uint64_t>(s.wait)).add(s.mailbox ? s.mailbox->hash() : 0);
    h.add(s.watches.size());
    for (const auto& w : s.watches) h.add(w.object).add(static_cast<std::uint64_t>(w.owner.index)).add(w.observed);
    s.program->hash_into(h);
  }
  for (const auto& o : objects_) {
    std::visit([&](const auto& obj) { obj.hash_into(h); }, o);
  }
  for (const auto& o : occupancy_) {
    h.add(o.label).add(static_cast<std::uint64_t>(o.peak)).add(o.inside.size());
    for (const auto& in : o.inside) {
      h.add(static_cast<std::uint64_t>(in.actor.index)).add(static_cast<std::uint64_t>(in.as.index));
    }
  }
  return h.digest();
}

Trace World::trace() const {
  Trace tr;
  tr.config = config_;
  for (const EventNode* e = events_.get(); e != nullptr; e = e->prev.get()) tr.events.push_back(e->event);
  std::reverse(tr.events.begin(), tr.events.end());
  for (const ActionNode* a = schedule_.get(); a != nullptr; a = a->prev.get()) tr.schedule.push_back(a->action);
  std::reverse(tr.schedule.begin(), tr.schedule.end());
  for (const auto& s : procs_) tr.outcomes.push_back(s.outcome);
  tr.truncated = truncated_;
  tr.objects = names_;
  return tr;
}

void StepContext::begin_shared() {
  if (acted_) throw ModelError("program performed two shared actions in one transition");
  acted_ = true;
}

void StepContext::park() {
  auto& s = world_.slot(self_);
  if (s.watches.empty()) throw ModelError("park without watched cells");
  s.wait = World::Wait::watch;
}

void StepContext::kis_invoke(ObjectRef<KisOracle> ref, Value v) {
  begin_shared();
  auto& kis = std::get<KisOracle>(world_.objects_.at(ref.index));
  if (world_.recording_) world_.emit(EventKind::invoke, self_, world_.names_[ref.index], "write_snapshot_k", to_json(v), Json());
  kis.invoke(self_, std::move(v));
  world_.slot(self_).wait = World::Wait::response;
}

View StepContext::take_response() {
  auto& s = world_.slot(self_);
  if (!s.mailbox) throw ModelError("no response to take");
  View v = std::move(*s.mailbox);
  s.mailbox.reset();
  return v;
}

Value StepContext::propose(ObjectRef<ConsensusOracle> ref, Value v) {
  begin_shared();
  auto& cs = std::get<ConsensusOracle>(world_.objects_.at(ref.index));
  const std::string& name = world_.names_[ref.index];
  if (world_.recording_) world_.emit(EventKind::invoke, self_, name, "propose", to_json(v), Json());
  Value decided = cs.propose(self_, std::move(v));
  if (world_.recording_) world_.emit(EventKind::respond, self_, name, "propose", Json(), to_json(decided));
  return decided;
}

void StepContext::invoke(std::string_view object, std::string_view op, const Value& arg) {
  if (world_.recording_) world_.emit(EventKind::invoke, self_, object, op, to_json(arg), Json());
}

void StepContext::respond(std::string_view object, std::string_view op, const Value& ret) {
  if (world_.recording_) world_.emit(EventKind::respond, self_, object, op, Json(), to_json(ret));
}

void StepContext::invoke_as(ProcessId as, std::string_view object, std::string_view op, const Value& arg) {
  auto& occ = world_.occupancy(object);
  occ.inside.push_back({self_, as});
  occ.peak = std::max(occ.peak, static_cast<int>(occ.inside.size()));
  if (world_.recording_) {
    Json args = Json::object();
    args["as"] = as.index;
    args["value"] = to_json(arg);
    world_.emit(EventKind::invoke, self_, object, op, std::move(args), Json());
  }
}

void StepContext::respond_as(ProcessId as, std::string_view object, std::string_view op, const Value& ret) {
  auto& occ = world_.occupancy(object);
  std::erase_if(occ.inside, [&](const World::Inside& in) { return in.actor == self_ && in.as == as; });
  if (world_.recording_) {
    Json args = Json::object();
    args["as"] = as.index;
    world_.emit(EventKind::respond, self_, object, op, std::move(args), to_json(ret));
  }
}

void StepContext::finish(std::optional<Value> result) {
  auto& s = world_.slot(self_);
  s.outcome = Outcome{ProcessStatus::returned, std::move(result)};
  s.watches.clear();
  s.wait = World::Wait::none;
}

}  // namespace kis
