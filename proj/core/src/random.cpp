#include "qtk/random.hpp"

#include <cmath>
#include <numbers>

namespace qtk {

__extension__ typedef unsigned __int128 u128;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t Stream::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  u128 m = static_cast<u128>(next()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    std::uint64_t t = (0 - n) % n;
    while (lo < t) {
      m = static_cast<u128>(next()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Stream::normal() {
  // Box-Muller, one output per call keeps the stream position simple.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {
constexpr std::uint64_t kRootKey = 0x6A09E667F3BCC909ull;
constexpr std::uint64_t kTagKey = 0xBB67AE8584CAA73Bull;
constexpr std::uint64_t kIdxKey = 0x3C6EF372FE94F82Bull;
}  // namespace

SeedPath::SeedPath(std::uint64_t root_seed) : key_(mix64(root_seed ^ kRootKey)) {}

SeedPath SeedPath::child(Tag tag, std::uint64_t index) const {
  std::uint64_t k = mix64(key_ ^ mix64(static_cast<std::uint64_t>(tag) + kTagKey));
  k = mix64(k ^ mix64(index + kIdxKey));
  return SeedPath(k, 0);
}

}  // namespace qtk
