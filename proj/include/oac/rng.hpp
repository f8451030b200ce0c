#pragma once

#include <cstdint>
#include <random>

namespace oac {

// Deterministic random source. Only the raw mt19937_64 stream is used;
// all distribution transforms are spelled out here so that sequences are
// reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller. No cached spare, so the stream
  // position is a pure function of the number of calls made.
  double normal();

  // Uniform on {0, ..., n-1}. The modulo bias is far below anything the
  // tests can resolve for the n used here.
  std::uint64_t uniform_index(std::uint64_t n) { return gen_() % n; }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

// Derives a child seed from (seed, tag, counter). Distinct tags give
// disjoint seed families, used to keep training and evaluation episode
// seeds from colliding.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag,
                       std::uint64_t counter);

}  // namespace oac
