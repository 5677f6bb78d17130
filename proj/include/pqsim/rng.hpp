#pragma once

#include <cstdint>

namespace pqsim {

// splitmix64: stateless, host-independent mixing used wherever a seeded
// value must be reproducible byte-for-byte across platforms.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Small deterministic generator. std::mt19937_64 is pinned by the standard,
// but the std distributions are not; this provides portable bounded draws.
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(splitmix64(seed ^ 0x5bf03635ULL)) {}

  uint64_t next() {
    state_ = splitmix64(state_);
    return state_;
  }

  // Uniform in [0, n). n must be > 0.
  uint64_t below(uint64_t n) { return next() % n; }

  // Uniform in [lo, hi] inclusive.
  uint64_t range(uint64_t lo, uint64_t hi) { return lo + below(hi - lo + 1); }

  // True with probability num/den.
  bool chance(uint64_t num, uint64_t den) { return below(den) < num; }

private:
  uint64_t state_;
};

}  // namespace pqsim
