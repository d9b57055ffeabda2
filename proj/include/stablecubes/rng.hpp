#pragma once

#include <cstdint>

namespace stablecubes {

// splitmix64: tiny, seedable, and identical on every platform. std::mt19937_64
// would also be portable, but the standard distributions are not, and byte-stable
// reports across toolchains are part of the contract.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, n)
  uint64_t below(uint64_t n) {
    // rejection-free Lemire reduction is overkill here; plain 128-bit scaling
    // keeps the stream deterministic and unbiased enough for instance sampling
    return uint64_t((__uint128_t(next()) * n) >> 64);
  }

  int range(int lo, int hi) {  // inclusive ends
    return lo + int(below(uint64_t(hi - lo + 1)));
  }

  bool coin() { return next() & 1; }

  double unit() { return double(next() >> 11) * (1.0 / 9007199254740992.0); }

 private:
  uint64_t state_;
};

}  // namespace stablecubes
