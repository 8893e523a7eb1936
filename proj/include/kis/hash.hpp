#pragma once

#include <cstdint>
#include <functional>
#include <string_view>

namespace kis {

inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 128-bit digest of a simulator state.
struct StateDigest {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  friend bool operator==(const StateDigest&, const StateDigest&) = default;
};

struct StateDigestHash {
  std::size_t operator()(const StateDigest& d) const noexcept {
    return static_cast<std::size_t>(d.hi ^ (d.lo * 0x9e3779b97f4a7c15ULL));
  }
};

/// Order-sensitive accumulator with two independently mixed lanes.
class StateHasher {
 public:
  StateHasher& add(std::uint64_t x) {
    hi_ = mix64(hi_ ^ x) + 0x2545f4914f6cdd1dULL;
    lo_ = mix64(lo_ + x * 0xff51afd7ed558ccdULL) ^ (lo_ >> 17);
    return *this;
  }
  StateHasher& add_signed(std::int64_t x) { return add(static_cast<std::uint64_t>(x)); }
  StateHasher& add(std::string_view s) {
    add(s.size());
    for (char c : s) add(static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    return *this;
  }

  StateDigest digest() const { return {mix64(hi_), mix64(lo_ ^ 0xc4ceb9fe1a85ec53ULL)}; }

 private:
  std::uint64_t hi_ = 0x6a09e667f3bcc908ULL;
  std::uint64_t lo_ = 0xbb67ae8584caa73bULL;
};

}  // namespace kis
