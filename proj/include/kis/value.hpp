#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace kis {

using Json = nlohmann::ordered_json;

/// 1-based process index.
struct ProcessId {
  int index = 0;

  constexpr auto operator<=>(const ProcessId&) const = default;
};

class Value;
struct Pair;

/// Immutable set of (pid, value) pairs, at most one pair per pid, kept sorted
/// by pid. Copies share storage.
class View {
 public:
  View() = default;
  explicit View(std::vector<Pair> pairs);

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::span<const Pair> pairs() const;
  const Pair* begin() const;
  const Pair* end() const;

  const Value* find(ProcessId pid) const;
  bool contains(ProcessId pid) const { return find(pid) != nullptr; }
  bool contains(const Pair& pair) const;
  bool subset_of(const View& other) const;

  /// Adds a pair; a pid already present must carry the same value.
  View with(const Pair& pair) const;
  View united(const View& other) const;

  /// Smallest value component. Throws on an empty view.
  const Value& min_value() const;

  std::uint64_t hash() const;

  friend bool operator==(const View& a, const View& b);
  /// Orders by cardinality first, then lexicographically by pairs.
  friend std::strong_ordering operator<=>(const View& a, const View& b);

 private:
  struct Node;
  std::shared_ptr<const Node> node_;
};

/// Totally ordered opaque value: an integer or a view. Integers sort before
/// views.
class Value {
 public:
  Value(std::int64_t v) : rep_(v) {}  // NOLINT(google-explicit-constructor)
  Value(int v) : rep_(static_cast<std::int64_t>(v)) {}  // NOLINT
  Value(View v) : rep_(std::move(v)) {}  // NOLINT

  bool is_int() const { return std::holds_alternative<std::int64_t>(rep_); }
  bool is_view() const { return std::holds_alternative<View>(rep_); }
  std::int64_t as_int() const;
  const View& as_view() const;

  std::uint64_t hash() const;

  friend bool operator==(const Value& a, const Value& b) { return a.rep_ == b.rep_; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

 private:
  std::variant<std::int64_t, View> rep_;
};

struct Pair {
  ProcessId pid;
  Value value;

  friend bool operator==(const Pair&, const Pair&) = default;
  friend std::strong_ordering operator<=>(const Pair& a, const Pair& b) {
    if (auto c = a.pid <=> b.pid; c != 0) return c;
    return a.value <=> b.value;
  }
};

inline const Pair* View::begin() const { return pairs().data(); }
inline const Pair* View::end() const { return pairs().data() + size(); }

Json to_json(const Value& v);
Json to_json(const View& v);
Value value_from_json(const Json& j);
View view_from_json(const Json& j);

std::string to_string(const Value& v);
std::string to_string(const View& v);

}  // namespace kis
