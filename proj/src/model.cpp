#include "kis/model.hpp"

#include <algorithm>
#include <array>

namespace kis {

void ModelConfig::validate() const {
  if (n < 1) throw ModelError("n must be at least 1");
  if (t < 0 || t >= n) throw ModelError("t must satisfy 0 <= t < n");
  if (k < 0 || k > std::max(0, n - 1)) throw ModelError("k must satisfy 0 <= k <= n-1");
  if (step_bound == 0) throw ModelError("step_bound must be positive");
}

void ModelConfig::validate_crash_model() const {
  validate();
  if (n < 3) throw ModelError("the crash model needs n >= 3");
  if (t < 1) throw ModelError("the crash model needs 0 < t");
}

namespace {

constexpr std::array<std::string_view, 7> kEventKindNames = {
    "invoke", "respond", "reg_write", "reg_read", "commit_batch", "crash", "blocked"};

}  // namespace

std::string_view to_string(EventKind kind) { return kEventKindNames.at(static_cast<std::size_t>(kind)); }

EventKind event_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kEventKindNames.size(); ++i) {
    if (kEventKindNames[i] == s) return static_cast<EventKind>(i);
  }
  throw std::invalid_argument("unknown event kind: " + std::string(s));
}

std::string_view to_string(ProcessStatus s) {
  switch (s) {
    case ProcessStatus::running: return "running";
    case ProcessStatus::returned: return "returned";
    case ProcessStatus::crashed: return "crashed";
    case ProcessStatus::blocked: return "blocked";
  }
  return "?";
}

std::vector<Value> Trace::decisions() const {
  std::vector<Value> out;
  for (const auto& o : outcomes) {
    if (o.status == ProcessStatus::returned && o.value) out.push_back(*o.value);
  }
  return out;
}

std::size_t Trace::distinct_decisions() const {
  auto d = decisions();
  std::sort(d.begin(), d.end());
  return static_cast<std::size_t>(std::unique(d.begin(), d.end()) - d.begin());
}

}  // namespace kis
