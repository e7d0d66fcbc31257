#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <unordered_set>
#include <vector>

namespace relim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_keys(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

// Counter-based bit stream. Position is explicit, so a replay from the same
// (key, offset) reproduces every draw.
class Tape {
 public:
  using result_type = std::uint64_t;

  Tape() = default;
  explicit Tape(std::uint64_t key, std::uint64_t offset = 0) : key_(key), offset_(offset) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next() { return splitmix64(key_ ^ splitmix64(offset_++)); }
  bool bit() { return (next() >> 63) != 0; }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n). Lemire's multiply-shift with rejection, portable across
  // standard libraries.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        x = next();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t offset() const { return offset_; }
  void seek(std::uint64_t offset) { offset_ = offset; }

  // Independent child stream; the parent advances by one draw.
  Tape split() { return Tape(next()); }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t offset_ = 0;
};

template <typename T>
void shuffle(std::vector<T>& v, Tape& tape) {
  for (std::size_t i = v.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(tape.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

// k distinct values from {1..n} not in `blocked`, uniformly, in draw order.
// Draws are inserted into `blocked`. Rejection is fine while the blocked set
// stays a modest fraction of n; the caller guarantees enough room.
inline std::vector<std::int64_t> draw_distinct(Tape& tape, std::int64_t n, std::int64_t k,
                                               std::unordered_set<std::int64_t>& blocked) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(k));
  while (static_cast<std::int64_t>(out.size()) < k) {
    auto v = static_cast<std::int64_t>(tape.below(static_cast<std::uint64_t>(n))) + 1;
    if (blocked.insert(v).second) out.push_back(v);
  }
  return out;
}

}  // namespace relim
