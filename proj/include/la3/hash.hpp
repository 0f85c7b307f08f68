#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>

namespace la3 {

// Fixed seed for every identifier hash in the fingerprint code. Changing it
// changes every emitted bit vector.
inline constexpr std::uint64_t kStableHashSeed = 0x4c41335f46503031ULL;  // "LA3_FP01"

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive, platform-independent hash of a sequence of integers.
class StableHasher {
 public:
  explicit constexpr StableHasher(std::uint64_t seed = kStableHashSeed) noexcept
      : state_(mix64(seed)) {}

  constexpr StableHasher& add(std::uint64_t v) noexcept {
    state_ = mix64(state_ ^ mix64(v + count_++));
    return *this;
  }
  constexpr StableHasher& add(std::int64_t v) noexcept {
    return add(static_cast<std::uint64_t>(v));
  }
  constexpr StableHasher& add(int v) noexcept {
    return add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
  }
  constexpr StableHasher& add(std::string_view s) noexcept {
    add(static_cast<std::uint64_t>(s.size()));
    for (unsigned char c : s) add(static_cast<std::uint64_t>(c));
    return *this;
  }

  [[nodiscard]] constexpr std::uint64_t digest() const noexcept {
    return mix64(state_ ^ count_);
  }

 private:
  std::uint64_t state_;
  std::uint64_t count_ = 0;
};

/// 64-bit FNV-1a; used for content addressing (cache keys, template hashes).
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t v);

}  // namespace la3
