#include "kis/value.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "kis/hash.hpp"

namespace kis {

struct View::Node {
  std::vector<Pair> pairs;
  std::uint64_t hash = 0;
};

namespace {

std::uint64_t hash_pairs(const std::vector<Pair>& pairs) {
  std::uint64_t h = mix64(0x5157ULL + pairs.size());
  for (const auto& p : pairs) {
    h = mix64(h ^ static_cast<std::uint64_t>(p.pid.index));
    h = mix64(h + p.value.hash());
  }
  return h;
}

const std::vector<Pair>& empty_pairs() {
  static const std::vector<Pair> empty;
  return empty;
}

}  // namespace

View::View(std::vector<Pair> pairs) {
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].pid == pairs[i - 1].pid) {
      throw std::invalid_argument("view holds two pairs for process " +
                                  std::to_string(pairs[i].pid.index));
    }
  }
  if (pairs.empty()) return;
  auto node = std::make_shared<Node>();
  node->hash = hash_pairs(pairs);
  node->pairs = std::move(pairs);
  node_ = std::move(node);
}

std::size_t View::size() const { return node_ ? node_->pairs.size() : 0; }

std::span<const Pair> View::pairs() const {
  return node_ ? std::span<const Pair>(node_->pairs) : std::span<const Pair>(empty_pairs());
}

const Value* View::find(ProcessId pid) const {
  auto ps = pairs();
  auto it = std::lower_bound(ps.begin(), ps.end(), pid,
                             [](const Pair& p, ProcessId id) { return p.pid < id; });
  if (it == ps.end() || it->pid != pid) return nullptr;
  return &it->value;
}

bool View::contains(const Pair& pair) const {
  const Value* v = find(pair.pid);
  return v != nullptr && *v == pair.value;
}

bool View::subset_of(const View& other) const {
  if (size() > other.size()) return false;
  if (node_ == other.node_) return true;
  return std::all_of(begin(), end(), [&](const Pair& p) { return other.contains(p); });
}

View View::with(const Pair& pair) const {
  if (const Value* v = find(pair.pid)) {
    if (*v != pair.value) {
      throw std::logic_error("conflicting values for process " + std::to_string(pair.pid.index));
    }
    return *this;
  }
  std::vector<Pair> ps(begin(), end());
  ps.push_back(pair);
  return View(std::move(ps));
}

View View::united(const View& other) const {
  if (other.subset_of(*this)) return *this;
  if (subset_of(other)) return other;
  std::vector<Pair> ps(begin(), end());
  for (const auto& p : other) {
    if (const Value* v = find(p.pid)) {
      if (*v != p.value) {
        throw std::logic_error("conflicting values for process " + std::to_string(p.pid.index));
      }
      continue;
    }
    ps.push_back(p);
  }
  return View(std::move(ps));
}

const Value& View::min_value() const {
  if (empty()) throw std::logic_error("min_value of an empty view");
  const Value* best = &begin()->value;
  for (const auto& p : *this) {
    if (p.value < *best) best = &p.value;
  }
  return *best;
}

std::uint64_t View::hash() const { return node_ ? node_->hash : 0x77ULL; }

bool operator==(const View& a, const View& b) {
  if (a.node_ == b.node_) return true;
  if (a.size() != b.size() || a.hash() != b.hash()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

std::strong_ordering operator<=>(const View& a, const View& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (auto c = a.begin()[i] <=> b.begin()[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::int64_t Value::as_int() const {
  if (!is_int()) throw std::logic_error("value is not an integer");
  return std::get<std::int64_t>(rep_);
}

const View& Value::as_view() const {
  if (!is_view()) throw std::logic_error("value is not a view");
  return std::get<View>(rep_);
}

std::uint64_t Value::hash() const {
  if (is_int()) return mix64(static_cast<std::uint64_t>(std::get<std::int64_t>(rep_)) ^ 0x1234ULL);
  return mix64(std::get<View>(rep_).hash() + 0x4321ULL);
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.is_int() != b.is_int()) return a.is_int() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.is_int()) return a.as_int() <=> b.as_int();
  return a.as_view() <=> b.as_view();
}

Json to_json(const View& v) {
  Json out = Json::array();
  for (const auto& p : v) out.push_back(Json::array({p.pid.index, to_json(p.value)}));
  return out;
}

Json to_json(const Value& v) {
  if (v.is_int()) return Json(v.as_int());
  return to_json(v.as_view());
}

View view_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("view must be a JSON array");
  std::vector<Pair> ps;
  ps.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer()) {
      throw std::invalid_argument("view entry must be [pid, value]");
    }
    ps.push_back(Pair{ProcessId{e[0].get<int>()}, value_from_json(e[1])});
  }
  return View(std::move(ps));
}

Value value_from_json(const Json& j) {
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_array()) return Value(view_from_json(j));
  throw std::invalid_argument("value must be an integer or a view, got: " + j.dump());
}

std::string to_string(const View& v) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& p : v) {
    if (!first) os << ',';
    first = false;
    os << '(' << p.pid.index << ',' << to_string(p.value) << ')';
  }
  os << '}';
  return os.str();
}

std::string to_string(const Value& v) {
  if (v.is_int()) return std::to_string(v.as_int());
  return to_string(v.as_view());
}

}  // namespace kis
