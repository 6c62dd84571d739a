#ifndef CODESPEC_RNG_HPP
#define CODESPEC_RNG_HPP

#include <cstdint>

namespace codespec {

// Counter-based deterministic generator. State is (key, counter); each
// draw mixes the pair through a SplitMix64-style finalizer, so output is
// identical on every platform and independent streams are cheap: split()
// derives a child key without advancing the parent. Every stochastic
// operation in the library takes an explicit Rng; there is no global
// state, and parallel units of work each get a split() child.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed, 0x6a09e667f3bcc909ull ^ stream)), counter_(0) {}

  std::uint64_t next() { return mix(key_, ++counter_); }

  // Unbiased uniform draw in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Child generator for lane `lane`; streams are independent of the
  // parent's draw position.
  Rng split(std::uint64_t lane) const {
    Rng child(0);
    child.key_ = mix(key_ ^ 0x9e3779b97f4a7c15ull, lane + 1);
    child.counter_ = 0;
    return child;
  }

 private:
  static std::uint64_t mix(std::uint64_t key, std::uint64_t counter) {
    std::uint64_t z = key + counter * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace codespec

#endif
