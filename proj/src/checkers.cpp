#include "kis/checkers.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace kis {

bool CheckReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.second.pass; });
}

const Verdict& CheckReport::verdict(std::string_view property) const {
  for (const auto& [name, v] : verdicts) {
    if (name == property) return v;
  }
  throw ModelError("property '" + std::string(property) + "' not checked on " + object);
}

std::vector<std::string> CheckReport::failures() const {
  std::vector<std::string> out;
  for (const auto& [name, v] : verdicts) {
    if (!v.pass) out.push_back(name);
  }
  return out;
}

Json CheckReport::to_json() const {
  Json j = Json::object();
  j["object"] = object;
  j["passed"] = passed();
  Json vs = Json::object();
  for (const auto& [name, v] : verdicts) {
    Json e = Json::object();
    e["pass"] = v.pass;
    if (!v.pass) e["witness"] = v.witness;
    vs[name] = std::move(e);
  }
  j["verdicts"] = std::move(vs);
  return j;
}

namespace {

bool simulated_form(const Json& args) { return args.is_object() && args.contains("as"); }

std::set<int> crashed_pids(const Trace& trace) {
  std::set<int> out;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::crash && e.pid) out.insert(e.pid->index);
  }
  return out;
}

Json op_json(const OpRecord& op) {
  Json j = Json::object();
  j["pid"] = op.pid.index;
  j["input"] = to_json(op.input);
  j["output"] = op.output ? to_json(*op.output) : Json();
  return j;
}

struct Returned {
  ProcessId pid;
  Value input;
  View view;
};

std::vector<Returned> returned_views(const History& h) {
  std::vector<Returned> out;
  for (const auto& op : h.ops) {
    if (op.output) {
      if (!op.output->is_view()) throw ModelError("object " + h.object + " returned a non-view value");
      out.push_back({op.pid, op.input, op.output->as_view()});
    }
  }
  return out;
}

Json pair_witness(const Returned& a, const Returned& b) {
  Json j = Json::object();
  j["pid_i"] = a.pid.index;
  j["view_i"] = to_json(a.view);
  j["pid_j"] = b.pid.index;
  j["view_j"] = to_json(b.view);
  return j;
}

Verdict termination(const History& h) {
  if (h.truncated) return Verdict::fail(Json{{"reason", "run truncated at step bound"}});
  for (const auto& op : h.ops) {
    if (!op.output && !op.crashed) {
      Json w = op_json(op);
      w["reason"] = "correct invoker never responded";
      return Verdict::fail(std::move(w));
    }
  }
  return Verdict::ok();
}

}  // namespace

History extract_history(const Trace& trace, std::string_view object) {
  History h;
  h.object = std::string(object);
  h.n = trace.config.n;
  h.truncated = trace.truncated;
  const bool known = std::find(trace.objects.begin(), trace.objects.end(), object) != trace.objects.end() ||
                     std::any_of(trace.events.begin(), trace.events.end(),
                                 [&](const Event& e) { return e.object == object; });
  if (!known) throw ModelError("unknown object '" + h.object + "'");
  const auto crashed = crashed_pids(trace);
  std::map<int, OpRecord> ops;
  for (const auto& e : trace.events) {
    if (e.object != object || !e.pid) continue;
    if (e.kind == EventKind::invoke) {
      if (simulated_form(e.args)) continue;
      const int p = e.pid->index;
      if (ops.count(p) != 0) throw ModelError("process " + std::to_string(p) + " invoked " + h.object + " twice");
      OpRecord r;
      r.pid = *e.pid;
      r.invoke_step = e.step;
      r.input = value_from_json(e.args);
      r.crashed = crashed.count(p) != 0;
      ops.emplace(p, std::move(r));
    } else if (e.kind == EventKind::respond) {
      if (simulated_form(e.args)) continue;
      auto it = ops.find(e.pid->index);
      if (it == ops.end()) {
        throw ModelError("respond without invoke on " + h.object + " by process " + std::to_string(e.pid->index));
      }
      if (it->second.output) throw ModelError("second respond on " + h.object);
      it->second.respond_step = e.step;
      it->second.output = value_from_json(e.ret);
    }
  }
  for (auto& [p, r] : ops) h.ops.push_back(std::move(r));
  return h;
}

CheckReport check_is(const History& h, std::optional<int> k) {
  CheckReport rep;
  rep.object = h.object;
  const auto rs = returned_views(h);
  std::map<int, Value> inputs;
  for (const auto& op : h.ops) inputs.emplace(op.pid.index, op.input);

  rep.verdicts.emplace_back("termination", termination(h));

  Verdict self = Verdict::ok();
  for (const auto& r : rs) {
    if (!r.view.contains(Pair{r.pid, r.input})) {
      self = Verdict::fail(Json{{"pid", r.pid.index}, {"input", to_json(r.input)}, {"view", to_json(r.view)}});
      break;
    }
  }
  rep.verdicts.emplace_back("self_inclusion", self);

  Verdict validity = Verdict::ok();
  for (const auto& r : rs) {
    for (const auto& p : r.view) {
      auto it = inputs.find(p.pid.index);
      if (it == inputs.end() || !(it->second == p.value)) {
        validity = Verdict::fail(Json{{"pid", r.pid.index},
                                      {"view", to_json(r.view)},
                                      {"bad_pair", Json::array({p.pid.index, to_json(p.value)})}});
        break;
      }
    }
    if (!validity.pass) break;
  }
  rep.verdicts.emplace_back("validity", validity);

  Verdict containment = Verdict::ok();
  for (std::size_t a = 0; a < rs.size() && containment.pass; ++a) {
    for (std::size_t b = a + 1; b < rs.size(); ++b) {
      if (!rs[a].view.subset_of(rs[b].view) && !rs[b].view.subset_of(rs[a].view)) {
        containment = Verdict::fail(pair_witness(rs[a], rs[b]));
        break;
      }
    }
  }
  rep.verdicts.emplace_back("containment", containment);

  // Primal: (i,-) in view_j implies view_i subset of view_j.
  Verdict immediacy = Verdict::ok();
  for (std::size_t a = 0; a < rs.size() && immediacy.pass; ++a) {
    for (std::size_t b = 0; b < rs.size(); ++b) {
      if (a != b && rs[b].view.contains(rs[a].pid) && !rs[a].view.subset_of(rs[b].view)) {
        immediacy = Verdict::fail(pair_witness(rs[a], rs[b]));
        break;
      }
    }
  }
  rep.verdicts.emplace_back("immediacy", immediacy);

  // Symmetric: each in the other's view implies equal views.
  Verdict symmetric = Verdict::ok();
  for (std::size_t a = 0; a < rs.size() && symmetric.pass; ++a) {
    for (std::size_t b = a + 1; b < rs.size(); ++b) {
      if (rs[a].view.contains(rs[b].pid) && rs[b].view.contains(rs[a].pid) && rs[a].view != rs[b].view) {
        symmetric = Verdict::fail(pair_witness(rs[a], rs[b]));
        break;
      }
    }
  }
  rep.verdicts.emplace_back("immediacy_symmetric", symmetric);

  // Under containment and self-inclusion the two forms are equivalent.
  Verdict agree = Verdict::ok();
  if (self.pass && containment.pass && immediacy.pass != symmetric.pass) {
    agree = Verdict::fail(Json{{"immediacy", immediacy.pass}, {"immediacy_symmetric", symmetric.pass}});
  }
  rep.verdicts.emplace_back("immediacy_forms_agree", agree);

  if (k) {
    const auto need = static_cast<std::size_t>(std::max(0, h.n - *k));
    Verdict size = Verdict::ok();
    for (const auto& r : rs) {
      if (r.view.size() < need) {
        size = Verdict::fail(Json{{"pid", r.pid.index}, {"view", to_json(r.view)}, {"min_size", need}});
        break;
      }
    }
    rep.verdicts.emplace_back("output_size", size);
  }
  return rep;
}

CheckReport check_is(const Trace& trace, std::string_view object, std::optional<int> k) {
  return check_is(extract_history(trace, object), k);
}

CheckReport check_theorem1(const History& h, int n, int k) {
  CheckReport rep;
  rep.object = h.object;
  const auto rs = returned_views(h);
  if (rs.empty()) {
    rep.verdicts.emplace_back("theorem1", Verdict::ok());
    return rep;
  }
  const View* min_view = &rs[0].view;
  for (const auto& r : rs) {
    if (r.view.size() < min_view->size()) min_view = &r.view;
  }
  Verdict v = Verdict::ok();
  if (static_cast<int>(min_view->size()) < n - k) {
    v = Verdict::fail(Json{{"min_view", to_json(*min_view)}, {"reason", "smallest view below n-k"}});
  } else {
    for (const auto& p : *min_view) {
      auto it = std::find_if(h.ops.begin(), h.ops.end(), [&](const OpRecord& op) { return op.pid == p.pid; });
      bool fine = false;
      if (it != h.ops.end()) {
        fine = it->output ? (it->output->is_view() && it->output->as_view() == *min_view) : it->crashed;
      }
      if (!fine) {
        Json w = Json::object();
        w["pid"] = p.pid.index;
        w["min_view"] = to_json(*min_view);
        w["output"] = (it != h.ops.end() && it->output) ? to_json(*it->output) : Json();
        v = Verdict::fail(std::move(w));
        break;
      }
    }
  }
  rep.verdicts.emplace_back("theorem1", v);
  return rep;
}

CheckReport check_theorem1(const Trace& trace, std::string_view object, int n, int k) {
  return check_theorem1(extract_history(trace, object), n, k);
}

CheckReport check_xsa(const Trace& trace, std::string_view object, int x) {
  const History h = extract_history(trace, object);
  CheckReport rep;
  rep.object = h.object;

  std::vector<Value> inputs;
  for (const auto& op : h.ops) inputs.push_back(op.input);
  std::set<Value> decided;
  Verdict validity = Verdict::ok();
  for (const auto& op : h.ops) {
    if (!op.output) continue;
    decided.insert(*op.output);
    if (validity.pass && std::find(inputs.begin(), inputs.end(), *op.output) == inputs.end()) {
      validity = Verdict::fail(op_json(op));
    }
  }
  rep.verdicts.emplace_back("validity", validity);

  Verdict agreement = Verdict::ok();
  if (static_cast<int>(decided.size()) > x) {
    Json d = Json::array();
    for (const auto& v : decided) d.push_back(to_json(v));
    agreement = Verdict::fail(Json{{"decisions", d}, {"x", x}});
  }
  rep.verdicts.emplace_back("agreement", agreement);

  Verdict term = Verdict::ok();
  if (trace.truncated) {
    term = Verdict::fail(Json{{"reason", "run truncated at step bound"}});
  } else {
    for (std::size_t i = 0; i < trace.outcomes.size(); ++i) {
      const auto& o = trace.outcomes[i];
      if (o.status != ProcessStatus::returned && o.status != ProcessStatus::crashed) {
        term = Verdict::fail(Json{{"pid", static_cast<int>(i) + 1}, {"status", to_string(o.status)}});
        break;
      }
    }
  }
  rep.verdicts.emplace_back("termination", term);
  return rep;
}

CheckReport check_consensus_linearizable(const Trace& trace, std::string_view object) {
  const History h = extract_history(trace, object);
  CheckReport rep;
  rep.object = h.object;

  std::optional<Value> decided;
  std::optional<std::uint64_t> first_response;
  Verdict single = Verdict::ok();
  for (const auto& op : h.ops) {
    if (!op.output) continue;
    if (!first_response || *op.respond_step < *first_response) first_response = op.respond_step;
    if (!decided) {
      decided = op.output;
    } else if (!(*decided == *op.output) && single.pass) {
      single = Verdict::fail(Json{{"decided", to_json(*decided)}, {"other", op_json(op)}});
    }
  }
  rep.verdicts.emplace_back("single_value", single);

  Verdict proposed = Verdict::ok();
  if (decided) {
    const bool found = std::any_of(h.ops.begin(), h.ops.end(), [&](const OpRecord& op) {
      return op.input == *decided && op.invoke_step <= *first_response;
    });
    if (!found) proposed = Verdict::fail(Json{{"decided", to_json(*decided)}, {"reason", "not proposed before first response"}});
  }
  rep.verdicts.emplace_back("proposed", proposed);
  rep.verdicts.emplace_back("termination", termination(h));
  return rep;
}

}  // namespace kis
