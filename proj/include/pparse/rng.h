#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pparse {

// splitmix64 step; used to derive independent per-sentence / per-iteration seeds.
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 wrapper with portable bounded draws (std::uniform_int_distribution is
// implementation-defined, which would break byte-identical reruns across toolchains).
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // uniform in [0, bound)
  uint64_t next_below(uint64_t bound) {
    // rejection sampling to avoid modulo bias
    uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound + 1) % bound;
    uint64_t v = engine_();
    while (v > limit) v = engine_();
    return v % bound;
  }

  // uniform in [0, 1)
  double next_double() { return (engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct values from [0, n), order of draw preserved
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    shuffle(pool);
    pool.resize(static_cast<size_t>(k < n ? k : n));
    return pool;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pparse
