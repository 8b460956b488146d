#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace popnet {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stateless fold of a word list into a 64-bit stream seed. Used wherever a
// reproducible per-item RNG stream is derived from a base seed.
constexpr std::uint64_t mix_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t w : words) h = splitmix64(h ^ w);
  return h;
}

// mt19937_64 with hand-rolled draw helpers so that streams are identical on
// every platform (std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform double in [0, 1), 53 random bits.
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = gen_();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return u01() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace popnet
