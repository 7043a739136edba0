#pragma once

#include <cstdint>
#include <limits>

namespace qtk {

// Role tags for SeedPath labels. Values are part of the derivation, so
// never renumber existing entries.
enum class Tag : std::uint32_t {
  Trial = 1,
  Client = 2,
  Coord = 3,
  Scale = 4,
  Rep = 5,
  Rotation = 6,
  Subset = 7,
  Private = 8,
  Gain = 9,
  Shape = 10,
  Step = 11,
  Oracle = 12,
  Quant = 13,
  Uniform = 14,
  Phase = 15,
  Restart = 16,
  Input = 17,
  Part = 18,
  Custom = 99,
};

std::uint64_t mix64(std::uint64_t z);

// splitmix64 counter stream.
class Stream {
 public:
  using result_type = std::uint64_t;
  explicit Stream(std::uint64_t state) : s_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next() { return mix64(s_ += 0x9E3779B97F4A7C15ull); }

  // 53-bit draw in [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  bool coin() { return (next() >> 63) != 0; }
  double normal();

 private:
  std::uint64_t s_;
};

// (root_seed, labels...) folded left to right. Only the folded key is
// stored, so child() is O(1) and paths are cheap to copy.
class SeedPath {
 public:
  explicit SeedPath(std::uint64_t root_seed);

  SeedPath child(Tag tag, std::uint64_t index = 0) const;
  Stream stream() const { return Stream(key_); }
  std::uint64_t key() const { return key_; }

  bool operator==(const SeedPath& o) const { return key_ == o.key_; }

 private:
  SeedPath(std::uint64_t key, int) : key_(key) {}
  std::uint64_t key_;
};

}  // namespace qtk
