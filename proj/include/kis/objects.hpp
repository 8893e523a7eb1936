#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kis/hash.hpp"
#include "kis/model.hpp"
#include "kis/value.hpp"

namespace kis {

/// Array of SWMR atomic registers: cell i is written only by process i. Every
/// cell starts at bottom (nullopt).
template <class Cell>
class RegisterArray {
 public:
  explicit RegisterArray(int n) : cells_(static_cast<std::size_t>(n)) {}

  int size() const { return static_cast<int>(cells_.size()); }
  const std::optional<Cell>& read(ProcessId owner) const { return cells_.at(slot(owner)); }
  void write(ProcessId owner, Cell c) { cells_.at(slot(owner)) = std::move(c); }

  void hash_into(StateHasher& h) const {
    for (const auto& c : cells_) h.add(c ? cell_hash(*c) : 0);
  }

 private:
  static std::size_t slot(ProcessId p) { return static_cast<std::size_t>(p.index - 1); }
  std::vector<std::optional<Cell>> cells_;
};

/// Cell of the level-based immediate snapshot: the written value and the
/// writer's current level.
struct LevelCell {
  Value value;
  int level = 0;

  friend bool operator==(const LevelCell&, const LevelCell&) = default;
};

inline std::uint64_t cell_hash(const Value& v) { return v.hash() | 1; }
inline std::uint64_t cell_hash(const LevelCell& c) {
  return mix64(c.value.hash() ^ static_cast<std::uint64_t>(c.level)) | 1;
}

Json to_json(const LevelCell& c);

using ValueRegisters = RegisterArray<Value>;
using LevelRegisters = RegisterArray<LevelCell>;

/// Set-linearizable k-immediate-snapshot oracle. Invocations sit in `pending`
/// until the adversary commits a batch; a batch is a concurrency class and
/// each live member receives the union of all classes up to its own.
class KisOracle {
 public:
  KisOracle(int n, int k);

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t min_output() const { return static_cast<std::size_t>(n_ - k_); }

  void invoke(ProcessId pid, Value v);

  const std::vector<Pair>& pending() const { return pending_; }
  const std::vector<View>& classes() const { return classes_; }
  const View& committed() const { return committed_; }
  const std::vector<std::pair<ProcessId, View>>& released() const { return released_; }
  bool invoked(ProcessId pid) const;

  /// True iff the batch is a non-empty subset of pending and the cumulative
  /// view after it has at least n-k pairs.
  bool can_commit(const std::vector<ProcessId>& batch) const;
  bool can_commit_some() const;
  /// Every batch accepted by can_commit, in a fixed order.
  std::vector<std::vector<ProcessId>> feasible_batches() const;
  std::vector<ProcessId> pending_pids() const;

  /// Commits the batch; returns the responses for members that are not
  /// crashed. Crashed members join the class but release nothing.
  std::vector<std::pair<ProcessId, View>> commit(const std::vector<ProcessId>& batch,
                                                 const std::function<bool(ProcessId)>& crashed);

  void hash_into(StateHasher& h) const;

 private:
  int n_;
  int k_;
  std::vector<Pair> pending_;
  std::vector<View> classes_;
  View committed_;
  std::vector<std::pair<ProcessId, View>> released_;
  std::vector<ProcessId> invokers_;
};

/// Linearizable consensus oracle; the first proposal wins.
class ConsensusOracle {
 public:
  Value propose(ProcessId pid, Value v);
  const std::optional<Value>& decided() const { return decided_; }
  void hash_into(StateHasher& h) const;

 private:
  std::optional<Value> decided_;
  std::vector<ProcessId> proposers_;
};

}  // namespace kis
