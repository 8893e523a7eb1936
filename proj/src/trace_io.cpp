#include "kis/trace_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace kis {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

Json config_json(const ModelConfig& c) {
  Json j = Json::object();
  j["n"] = c.n;
  j["t"] = c.t;
  j["k"] = c.k;
  j["seed"] = c.seed;
  j["step_bound"] = c.step_bound;
  return j;
}

ModelConfig config_from_json(const Json& j) {
  ModelConfig c;
  c.n = j.at("n").get<int>();
  c.t = j.at("t").get<int>();
  c.k = j.at("k").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.step_bound = j.at("step_bound").get<std::size_t>();
  return c;
}

ProcessStatus status_from_string(const std::string& s) {
  for (auto st : {ProcessStatus::running, ProcessStatus::returned, ProcessStatus::crashed, ProcessStatus::blocked}) {
    if (to_string(st) == s) return st;
  }
  throw std::invalid_argument("unknown status: " + s);
}

Event event_from_json(const Json& j) {
  Event e;
  e.step = j.at("step").get<std::uint64_t>();
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  if (!j.at("pid").is_null()) e.pid = ProcessId{j.at("pid").get<int>()};
  if (!j.at("obj").is_null()) e.object = j.at("obj").get<std::string>();
  e.op = j.at("op").get<std::string>();
  e.args = j.at("args");
  e.ret = j.at("ret");
  return e;
}

std::string_view kind_name(Action::Kind k) {
  switch (k) {
    case Action::Kind::step: return "step";
    case Action::Kind::crash: return "crash";
    case Action::Kind::commit: return "commit";
  }
  return "?";
}

}  // namespace

Json event_to_json(const Event& e) {
  Json j = Json::object();
  j["step"] = e.step;
  j["kind"] = to_string(e.kind);
  j["pid"] = e.pid ? Json(e.pid->index) : Json();
  j["obj"] = e.object.empty() ? Json() : Json(e.object);
  j["op"] = e.op;
  j["args"] = e.args;
  j["ret"] = e.ret;
  return j;
}

void write_trace(std::ostream& os, const Trace& trace) {
  Json header = Json::object();
  header["config"] = config_json(trace.config);
  header["objects"] = trace.objects;
  os << header.dump() << '\n';
  for (const auto& e : trace.events) os << event_to_json(e).dump() << '\n';
  Json footer = Json::object();
  Json outs = Json::array();
  for (std::size_t i = 0; i < trace.outcomes.size(); ++i) {
    const auto& o = trace.outcomes[i];
    Json oj = Json::object();
    oj["pid"] = static_cast<int>(i) + 1;
    oj["status"] = to_string(o.status);
    oj["value"] = o.value ? to_json(*o.value) : Json();
    outs.push_back(std::move(oj));
  }
  footer["outcomes"] = std::move(outs);
  footer["truncated"] = trace.truncated;
  os << footer.dump() << '\n';
}

std::string trace_to_string(const Trace& trace) {
  std::ostringstream os;
  write_trace(os, trace);
  return os.str();
}

Trace read_trace(std::istream& is) {
  Trace tr;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  bool footer = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (footer) throw ParseError(lineno, "content after the footer line");
    try {
      const Json j = Json::parse(line);
      if (!j.is_object()) throw ParseError(lineno, "expected a JSON object");
      if (!header) {
        if (!j.contains("config")) throw ParseError(lineno, "first line must carry the config");
        tr.config = config_from_json(j.at("config"));
        if (j.contains("objects")) tr.objects = j.at("objects").get<std::vector<std::string>>();
        header = true;
      } else if (j.contains("outcomes")) {
        for (const auto& oj : j.at("outcomes")) {
          Outcome o;
          o.status = status_from_string(oj.at("status").get<std::string>());
          if (!oj.at("value").is_null()) o.value = value_from_json(oj.at("value"));
          tr.outcomes.push_back(std::move(o));
        }
        tr.truncated = j.at("truncated").get<bool>();
        footer = true;
      } else {
        tr.events.push_back(event_from_json(j));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ParseError(lineno, ex.what());
    }
  }
  if (header && !footer) throw ParseError(lineno, "missing footer line");
  return tr;
}

Trace read_trace_string(const std::string& text) {
  std::istringstream is(text);
  return read_trace(is);
}

void save_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_trace(os, trace);
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_trace(is);
}

void write_schedule(std::ostream& os, const std::vector<ScheduledChoice>& choices) {
  for (const auto& c : choices) {
    Json j = Json::object();
    j["action"] = kind_name(c.kind);
    if (c.kind == Action::Kind::commit) {
      j["obj"] = c.object;
      Json b = Json::array();
      for (ProcessId p : c.batch) b.push_back(p.index);
      j["batch"] = std::move(b);
    } else {
      j["pid"] = c.pid.index;
    }
    os << j.dump() << '\n';
  }
}

std::vector<ScheduledChoice> read_schedule(std::istream& is) {
  std::vector<ScheduledChoice> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      ScheduledChoice c;
      const auto action = j.at("action").get<std::string>();
      if (action == "step" || action == "crash") {
        c.kind = action == "step" ? Action::Kind::step : Action::Kind::crash;
        c.pid = ProcessId{j.at("pid").get<int>()};
      } else if (action == "commit") {
        c.kind = Action::Kind::commit;
        c.object = j.at("obj").get<std::string>();
        for (const auto& p : j.at("batch")) c.batch.push_back(ProcessId{p.get<int>()});
      } else {
        throw ParseError(lineno, "unknown action '" + action + "'");
      }
      out.push_back(std::move(c));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ParseError(lineno, ex.what());
    }
  }
  return out;
}

void save_schedule(const std::filesystem::path& path, const std::vector<ScheduledChoice>& choices) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_schedule(os, choices);
}

std::vector<ScheduledChoice> load_schedule(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_schedule(is);
}

}  // namespace kis
