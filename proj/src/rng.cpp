#include "oac/rng.hpp"

#include <cmath>
#include <numbers>

namespace oac {

double Rng::normal() {
  // u1 in (0, 1] so the log is finite; u2 in [0, 1).
  const double u1 =
      static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag,
                       std::uint64_t counter) {
  return splitmix64(splitmix64(seed ^ splitmix64(tag)) ^ counter);
}

}  // namespace oac
