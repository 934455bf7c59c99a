#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pmc {

/// Counter-based deterministic generator (splitmix64 over seed + counter).
/// All randomness in the project derives from one of these, so transcripts
/// and reports are bit-exact across runs and platforms for equal seeds.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound), bound > 0. Rejection sampling keeps the
  /// distribution exact and implementation-independent.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("CounterRng: bound must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  int next_sign() { return (next_u64() & 1u) ? 1 : -1; }

  /// Derive an independent stream for a sub-task.
  CounterRng fork(std::uint64_t tag) {
    std::uint64_t z = seed_ ^ (0xD1B54A32D192ED03ULL * (tag + 1));
    z = (z ^ (z >> 29)) * 0xFF51AFD7ED558CCDULL;
    return CounterRng(z ^ (z >> 32));
  }

  /// Uniform injection of `count` slots into `pool` (drawn without
  /// replacement, order significant). Consumes the front of a partial
  /// Fisher-Yates shuffle.
  std::vector<int> sample_injection(std::vector<int> pool, std::size_t count) {
    if (count > pool.size())
      throw std::invalid_argument("CounterRng: injection larger than pool");
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(next_below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace pmc
