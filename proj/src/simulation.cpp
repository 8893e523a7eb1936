#include "kis/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace kis {

void Partition::validate(int n) const {
  if (a0.empty() || a0.size() != a1.size()) throw ModelError("partition needs |A0| = |A1| >= 1");
  std::set<int> seen;
  for (const auto* part : {&a0, &a1, &d}) {
    for (ProcessId p : *part) {
      if (p.index < 1 || p.index > n) throw ModelError("partition names process " + std::to_string(p.index));
      if (!seen.insert(p.index).second) throw ModelError("partition repeats process " + std::to_string(p.index));
    }
  }
  if (static_cast<int>(seen.size()) != n) throw ModelError("partition does not cover 1.." + std::to_string(n));
}

std::string Partition::to_string() const {
  std::ostringstream os;
  auto list = [&](const std::vector<ProcessId>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].index;
  };
  list(a0);
  os << '|';
  list(a1);
  os << '|';
  list(d);
  return os.str();
}

Partition Partition::parse(std::string_view text) {
  std::vector<std::vector<ProcessId>> parts(1);
  std::string_view rest = text;
  auto parse_list = [](std::string_view s) {
    std::vector<ProcessId> out;
    while (!s.empty()) {
      auto comma = s.find(',');
      std::string_view item = s.substr(0, comma);
      int v = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size()) {
        throw ModelError("bad partition entry '" + std::string(item) + "'");
      }
      out.push_back(ProcessId{v});
      if (comma == std::string_view::npos) break;
      s.remove_prefix(comma + 1);
    }
    return out;
  };
  std::vector<std::string_view> fields;
  while (true) {
    auto bar = rest.find('|');
    fields.push_back(rest.substr(0, bar));
    if (bar == std::string_view::npos) break;
    rest.remove_prefix(bar + 1);
  }
  if (fields.size() < 2 || fields.size() > 3) throw ModelError("partition must look like A0|A1|D");
  Partition p;
  p.a0 = parse_list(fields[0]);
  p.a1 = parse_list(fields[1]);
  if (fields.size() == 3) p.d = parse_list(fields[2]);
  return p;
}

Partition Partition::standard(int n, int t) {
  if (2 * t < n || t >= n) throw ModelError("standard partition needs n/2 <= t < n");
  const int side = n - t;
  Partition p;
  for (int i = 1; i <= n; ++i) {
    auto& part = i <= side ? p.a0 : (i <= 2 * side ? p.a1 : p.d);
    part.push_back(ProcessId{i});
  }
  return p;
}

InnerSpec alg1_variant_inner(const ModelConfig& inner) {
  InnerSpec s;
  s.config = inner;
  s.factory = [](Value v) { return std::make_unique<Alg1VariantProtocol>(std::move(v)); };
  s.name = "alg1v";
  s.object_names = {"kis1", "kis2"};
  return s;
}

// ---------------------------------------------------------------------------

SimulatorProgram::SimulatorProgram(int side, const InnerSpec& inner, const Partition& partition, Objects objects,
                                   Value input)
    : side_(side), name_(inner.name), object_names_(inner.object_names), objects_(std::move(objects)),
      input_(std::move(input)), prop_(inner.object_names.size()), mine_(inner.object_names.size()),
      idle_watch_(inner.object_names.size(), false) {
  for (ProcessId p : partition.side(side)) {
    // Every member starts from the simulator's own input.
    Member m;
    m.pid = p;
    m.protocol = ClonePtr<KisProtocol>(inner.factory(input_));
    members_.push_back(std::move(m));
  }
}

std::string SimulatorProgram::label(std::size_t o) const { return "sim/" + object_names_.at(o); }

void SimulatorProgram::answer(StepContext& ctx, Member& m, std::size_t o, const View& view) {
  ctx.respond_as(m.pid, label(o), "write_snapshot_k", Value(view));
  m.protocol->complete(view);
  m.answers = mix64(m.answers ^ view.hash()) + o;
}

bool SimulatorProgram::maybe_snapshot(std::size_t o) {
  if (prop_[o].size() == members_.size() && !mine_[o]) {
    stage_ = Stage::snapshot_invoke;
    stage_object_ = o;
    return true;
  }
  return false;
}

void SimulatorProgram::end_body(StepContext& ctx, bool progress) {
  if (progress) {
    idle_ = 0;
    std::fill(idle_watch_.begin(), idle_watch_.end(), false);
  } else {
    ++idle_;
  }
  cursor_ = (cursor_ + 1) % members_.size();

  const auto unfinished =
      static_cast<std::size_t>(std::count_if(members_.begin(), members_.end(), [](const Member& m) { return !m.done; }));
  if (unfinished == 0) {
    ctx.respond("sim", "propose", *decision_);
    ctx.finish(*decision_);
    return;
  }
  // A whole round of fruitless re-reads: sleep until the other side publishes.
  if (idle_ >= unfinished) {
    bool any = false;
    for (std::size_t o = 0; o < idle_watch_.size(); ++o) {
      if (idle_watch_[o]) {
        ctx.watch(objects_.reg[o], other(), std::optional<Value>());
        any = true;
      }
    }
    if (any) ctx.park();
    idle_ = 0;
    std::fill(idle_watch_.begin(), idle_watch_.end(), false);
  }
}

void SimulatorProgram::body(StepContext& ctx) {
  Member& m = members_[cursor_];
  if (m.done) {
    cursor_ = (cursor_ + 1) % members_.size();
    return;
  }
  if (!m.started) {
    m.started = true;
    ctx.invoke_as(m.pid, "sim/" + name_, "propose", input_);
  }
  const ProtocolOp op = m.protocol->next();
  switch (op.kind) {
    case ProtocolOp::Kind::local:
      m.protocol->complete(std::nullopt);
      end_body(ctx, true);
      return;
    case ProtocolOp::Kind::decide:
      m.protocol->complete(std::nullopt);
      ctx.respond_as(m.pid, "sim/" + name_, "propose", op.value);
      m.done = true;
      if (!decision_) decision_ = op.value;
      end_body(ctx, true);
      return;
    case ProtocolOp::Kind::write_snapshot: break;
  }

  const std::size_t o = op.object;
  const Pair mine_pair{m.pid, op.value};
  bool progress = false;
  if (!prop_[o].contains(m.pid)) {
    ctx.invoke_as(m.pid, label(o), "write_snapshot_k", op.value);
    prop_[o] = prop_[o].with(mine_pair);
    progress = true;
  }
  if (mine_[o]) {
    // Already have a view for o: grow it by this member's pair.
    View next = mine_[o]->with(mine_pair);
    ctx.write(objects_.reg[o], Value(next));
    mine_[o] = next;
    answer(ctx, m, o, next);
    end_body(ctx, true);
    return;
  }

  auto theirs = ctx.read(objects_.reg[o], other());
  if (theirs) {
    stage_ = Stage::adopt;
    stage_object_ = o;
    stage_view_ = theirs->as_view().with(mine_pair);
    return;
  }
  if (maybe_snapshot(o)) return;
  if (!progress) idle_watch_[o] = true;
  end_body(ctx, progress);
}

void SimulatorProgram::step(StepContext& ctx) {
  if (!started_) {
    started_ = true;
    ctx.invoke("sim", "propose", input_);
  }
  switch (stage_) {
    case Stage::body:
      body(ctx);
      return;
    case Stage::adopt: {
      // Adopt the other simulator's view and add our member.
      const std::size_t o = stage_object_;
      ctx.write(objects_.reg[o], Value(stage_view_));
      mine_[o] = stage_view_;
      stage_ = Stage::body;
      answer(ctx, members_[cursor_], o, stage_view_);
      end_body(ctx, true);
      return;
    }
    case Stage::snapshot_invoke:
      ctx.kis_invoke(objects_.is[stage_object_], Value(prop_[stage_object_]));
      stage_ = Stage::snapshot_wait;
      return;
    case Stage::snapshot_wait: {
      const std::size_t o = stage_object_;
      View got = ctx.take_response();
      View flat;
      for (const auto& p : got) flat = flat.united(p.value.as_view());
      ctx.write(objects_.reg[o], Value(flat));
      mine_[o] = flat;
      stage_ = Stage::body;
      end_body(ctx, true);
      return;
    }
  }
}

void SimulatorProgram::hash_into(StateHasher& h) const {
  h.add(static_cast<std::uint64_t>(side_)).add(cursor_).add(static_cast<std::uint64_t>(stage_));
  h.add(stage_object_).add(stage_view_.hash()).add(idle_).add(started_ ? 1 : 0);
  h.add(decision_ ? decision_->hash() : 0);
  for (std::size_t o = 0; o < prop_.size(); ++o) {
    h.add(prop_[o].hash()).add(mine_[o] ? mine_[o]->hash() | 1 : 0).add(idle_watch_[o] ? 1 : 0);
  }
  for (const auto& m : members_) {
    h.add(m.started ? 1 : 0).add(m.done ? 1 : 0).add(m.answers);
    m.protocol->hash_into(h);
  }
}

// ---------------------------------------------------------------------------

SimulationSetup make_simulation(InnerSpec inner, Partition partition, std::array<std::int64_t, 2> inputs,
                                std::uint64_t seed, std::size_t step_bound) {
  inner.config.validate_crash_model();
  partition.validate(inner.config.n);
  if (static_cast<int>(partition.d.size() + partition.a0.size()) > inner.config.t) {
    throw ModelError("crashing D and one side would exceed t");
  }
  World outer(ModelConfig{2, 1, 1, seed, step_bound});
  SimulatorProgram::Objects objs;
  for (const auto& name : inner.object_names) objs.reg.push_back(outer.add_object("REG/" + name, ValueRegisters(2)));
  for (const auto& name : inner.object_names) objs.is.push_back(outer.add_object("IS/" + name, KisOracle(2, 1)));
  for (int side = 0; side < 2; ++side) {
    outer.add_process(std::make_unique<SimulatorProgram>(side, inner, partition, objs,
                                                         Value(inputs[static_cast<std::size_t>(side)])));
  }
  return SimulationSetup{std::move(inner), std::move(partition), std::move(outer)};
}

int max_inside(const Trace& trace, std::string_view object) {
  std::set<int> inside;
  int peak = 0;
  for (const auto& e : trace.events) {
    if (!e.pid) continue;
    if (e.kind == EventKind::crash) {
      inside.erase(e.pid->index);
    } else if (e.object == object && e.kind == EventKind::invoke) {
      inside.insert(e.pid->index);
      peak = std::max(peak, static_cast<int>(inside.size()));
    } else if (e.object == object && e.kind == EventKind::respond) {
      inside.erase(e.pid->index);
    }
  }
  return peak;
}

SimulatedRun extract_simulated_history(const Trace& outer, const SimulationSetup& setup) {
  const InnerSpec& spec = setup.inner;
  SimulatedRun run;
  Trace& in = run.inner;
  in.config = spec.config;
  in.objects = spec.object_names;
  in.objects.push_back(spec.name);
  in.truncated = outer.truncated;

  const int n = spec.config.n;
  std::vector<Outcome> outcomes(static_cast<std::size_t>(n), Outcome{ProcessStatus::blocked, std::nullopt});
  std::uint64_t step = 0;
  auto emit = [&](EventKind kind, ProcessId pid, std::string obj, std::string op, Json args, Json ret) {
    in.events.push_back(Event{step++, kind, pid, std::move(obj), std::move(op), std::move(args), std::move(ret)});
  };
  for (ProcessId p : setup.partition.d) {
    emit(EventKind::crash, p, "", "crash", Json(), Json());
    outcomes[static_cast<std::size_t>(p.index - 1)].status = ProcessStatus::crashed;
  }

  const std::string top = "sim/" + spec.name;
  for (const auto& e : outer.events) {
    if (e.kind == EventKind::crash && e.pid) {
      for (ProcessId p : setup.partition.side(e.pid->index - 1)) {
        auto& o = outcomes[static_cast<std::size_t>(p.index - 1)];
        if (o.status == ProcessStatus::returned) continue;
        emit(EventKind::crash, p, "", "crash", Json(), Json());
        o.status = ProcessStatus::crashed;
      }
      continue;
    }
    if (e.kind != EventKind::invoke && e.kind != EventKind::respond) continue;
    if (!e.args.is_object() || !e.args.contains("as") || e.object.rfind("sim/", 0) != 0) continue;
    const ProcessId p{e.args["as"].get<int>()};
    std::string obj = e.object.substr(4);
    if (e.kind == EventKind::invoke) {
      emit(EventKind::invoke, p, std::move(obj), e.op, e.args["value"], Json());
    } else {
      if (e.object == top) {
        outcomes[static_cast<std::size_t>(p.index - 1)] = Outcome{ProcessStatus::returned, value_from_json(e.ret)};
      }
      emit(EventKind::respond, p, std::move(obj), e.op, Json(), e.ret);
    }
  }
  in.outcomes = std::move(outcomes);

  for (const auto& name : spec.object_names) {
    Lemma1Report r;
    r.object = name;
    r.has_response = std::any_of(in.events.begin(), in.events.end(), [&](const Event& e) {
      return e.kind == EventKind::respond && e.object == name;
    });
    r.max_inside = max_inside(in, name);
    r.witness = !r.has_response || r.max_inside >= n - spec.config.k;
    run.lemma1.push_back(std::move(r));
  }
  return run;
}

}  // namespace kis
