#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kis/value.hpp"

namespace kis {

/// Raised when a model parameter or program violates its contract.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  int n = 3;
  int t = 1;
  int k = 1;
  std::uint64_t seed = 0;
  std::size_t step_bound = 100000;

  /// Simulator-level sanity: n >= 1, 0 <= t < n, 0 <= k <= n-1.
  void validate() const;
  /// The crash model proper: n >= 3 and 0 < t < n.
  void validate_crash_model() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class EventKind : std::uint8_t { invoke, respond, reg_write, reg_read, commit_batch, crash, blocked };

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view s);

struct Event {
  std::uint64_t step = 0;
  EventKind kind = EventKind::invoke;
  std::optional<ProcessId> pid;
  std::string object;
  std::string op;
  Json args;
  Json ret;

  friend bool operator==(const Event&, const Event&) = default;
};

enum class ProcessStatus : std::uint8_t { running, returned, crashed, blocked };

std::string_view to_string(ProcessStatus s);

struct Outcome {
  ProcessStatus status = ProcessStatus::running;
  std::optional<Value> value;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// One scheduler choice. A commit with an empty batch is a placeholder meaning
/// "some batch of this object", resolved by the schedule source.
struct Action {
  enum class Kind : std::uint8_t { step, crash, commit };

  Kind kind = Kind::step;
  ProcessId pid{};
  std::size_t object = 0;
  std::vector<ProcessId> batch;

  static Action step(ProcessId p) { return {Kind::step, p, 0, {}}; }
  static Action crash(ProcessId p) { return {Kind::crash, p, 0, {}}; }
  static Action commit(std::size_t obj, std::vector<ProcessId> b = {}) {
    return {Kind::commit, {}, obj, std::move(b)};
  }

  friend bool operator==(const Action&, const Action&) = default;
};

struct Trace {
  ModelConfig config;
  std::vector<Event> events;
  std::vector<Outcome> outcomes;  // index pid-1
  bool truncated = false;
  std::vector<std::string> objects;  // object names by index
  std::vector<Action> schedule;

  const Outcome& outcome(ProcessId p) const { return outcomes.at(static_cast<std::size_t>(p.index - 1)); }
  /// Values returned by processes that returned one.
  std::vector<Value> decisions() const;
  std::size_t distinct_decisions() const;
};

}  // namespace kis
