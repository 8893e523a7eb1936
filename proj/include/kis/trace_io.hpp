#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "kis/model.hpp"
#include "kis/schedule.hpp"

namespace kis {

/// Malformed trace or schedule input; `line` is 1-based (0 when unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// JSONL: a header line {"config", "objects"}, one line per event
/// {step, kind, pid, obj, op, args, ret}, and a footer {"outcomes", "truncated"}.
void write_trace(std::ostream& os, const Trace& trace);
std::string trace_to_string(const Trace& trace);
/// An empty input yields an empty trace.
Trace read_trace(std::istream& is);
Trace read_trace_string(const std::string& text);

void save_trace(const std::filesystem::path& path, const Trace& trace);
Trace load_trace(const std::filesystem::path& path);

Json event_to_json(const Event& e);

/// One choice per line: {"action":"step","pid":2}, {"action":"crash","pid":1},
/// {"action":"commit","obj":"kis","batch":[1,3]}.
void write_schedule(std::ostream& os, const std::vector<ScheduledChoice>& choices);
std::vector<ScheduledChoice> read_schedule(std::istream& is);
void save_schedule(const std::filesystem::path& path, const std::vector<ScheduledChoice>& choices);
std::vector<ScheduledChoice> load_schedule(const std::filesystem::path& path);

}  // namespace kis
