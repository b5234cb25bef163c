#pragma once

#include <bit>
#include <cstdint>

namespace xratio {

// SplitMix64 (Steele/Lea/Flood). Used instead of <random> engines plus
// std::uniform_int_distribution because the distribution's output sequence is
// implementation-defined; this one is bit-identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform over [0, bound); masked rejection, so no modulo bias
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t mask = ~0ull >> std::countl_zero(bound - 1);
    for (;;) {
      std::uint64_t r = next() & mask;
      if (r < bound) return r;
    }
  }

 private:
  std::uint64_t state_;
};

// per-instance seed for the counter-th attempt of a run; the finalizer keeps
// adjacent counters statistically unrelated while staying reproducible
inline std::uint64_t mix_seed(std::uint64_t run_seed, std::uint64_t counter) {
  std::uint64_t z = run_seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace xratio
