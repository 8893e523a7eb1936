#include "kis/objects.hpp"

#include <algorithm>

namespace kis {

Json to_json(const LevelCell& c) {
  Json j = Json::object();
  j["value"] = to_json(c.value);
  j["level"] = c.level;
  return j;
}

KisOracle::KisOracle(int n, int k) : n_(n), k_(k) {
  if (n < 1 || k < 0 || k > n - 1) throw ModelError("k-IS oracle needs 0 <= k <= n-1");
}

bool KisOracle::invoked(ProcessId pid) const {
  return std::find(invokers_.begin(), invokers_.end(), pid) != invokers_.end();
}

void KisOracle::invoke(ProcessId pid, Value v) {
  if (invoked(pid)) {
    throw ModelError("process " + std::to_string(pid.index) + " invoked write_snapshot_k twice");
  }
  invokers_.push_back(pid);
  pending_.push_back(Pair{pid, std::move(v)});
  std::sort(pending_.begin(), pending_.end());
}

std::vector<ProcessId> KisOracle::pending_pids() const {
  std::vector<ProcessId> out;
  out.reserve(pending_.size());
  for (const auto& p : pending_) out.push_back(p.pid);
  return out;
}

bool KisOracle::can_commit(const std::vector<ProcessId>& batch) const {
  if (batch.empty()) return false;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (i > 0 && !(batch[i - 1] < batch[i])) return false;
    bool found = std::any_of(pending_.begin(), pending_.end(),
                             [&](const Pair& p) { return p.pid == batch[i]; });
    if (!found) return false;
  }
  return committed_.size() + batch.size() >= min_output();
}

bool KisOracle::can_commit_some() const {
  return !pending_.empty() && committed_.size() + pending_.size() >= min_output();
}

std::vector<std::vector<ProcessId>> KisOracle::feasible_batches() const {
  std::vector<std::vector<ProcessId>> out;
  const std::size_t m = pending_.size();
  if (m == 0 || m > 20) {
    if (m > 20) out.push_back(pending_pids());
    return out;
  }
  for (std::uint32_t mask = 1; mask < (1U << m); ++mask) {
    std::vector<ProcessId> b;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1U << i)) b.push_back(pending_[i].pid);
    }
    if (committed_.size() + b.size() >= min_output()) out.push_back(std::move(b));
  }
  return out;
}

std::vector<std::pair<ProcessId, View>> KisOracle::commit(const std::vector<ProcessId>& batch,
                                                          const std::function<bool(ProcessId)>& crashed) {
  if (batch.empty()) throw ModelError("empty commit batch");
  if (!can_commit(batch)) throw ModelError("commit batch is not a feasible subset of pending");
  std::vector<Pair> cls;
  for (ProcessId pid : batch) {
    auto it = std::find_if(pending_.begin(), pending_.end(), [&](const Pair& p) { return p.pid == pid; });
    cls.push_back(*it);
    pending_.erase(it);
  }
  View cls_view(std::move(cls));
  committed_ = committed_.united(cls_view);
  classes_.push_back(cls_view);
  std::vector<std::pair<ProcessId, View>> out;
  for (const auto& p : cls_view) {
    if (crashed(p.pid)) continue;
    out.emplace_back(p.pid, committed_);
    released_.emplace_back(p.pid, committed_);
  }
  return out;
}

void KisOracle::hash_into(StateHasher& h) const {
  h.add(0x6b6973ULL);
  h.add(pending_.size());
  for (const auto& p : pending_) h.add(static_cast<std::uint64_t>(p.pid.index)).add(p.value.hash());
  h.add(classes_.size());
  for (const auto& c : classes_) h.add(c.hash());
  h.add(released_.size());
  for (const auto& [pid, v] : released_) h.add(static_cast<std::uint64_t>(pid.index));
}

Value ConsensusOracle::propose(ProcessId pid, Value v) {
  if (std::find(proposers_.begin(), proposers_.end(), pid) != proposers_.end()) {
    throw ModelError("process " + std::to_string(pid.index) + " proposed twice");
  }
  proposers_.push_back(pid);
  if (!decided_) decided_ = std::move(v);
  return *decided_;
}

void ConsensusOracle::hash_into(StateHasher& h) const {
  h.add(0x636f6eULL);
  h.add(decided_ ? decided_->hash() : 0);
  std::uint64_t mask = 0;
  for (ProcessId p : proposers_) mask |= 1ULL << (p.index % 64);
  h.add(mask);
}

}  // namespace kis
