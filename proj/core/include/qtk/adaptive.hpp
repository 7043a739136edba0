#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qtk/bits.hpp"
#include "qtk/random.hpp"
#include "qtk/scalar.hpp"

namespace qtk {

// e^{*i}; +inf from i = 4 on (e^{*4} ~ e^{3.8e6}). i > 5 throws.
double tetration(int i);
// least i with e^{*i} >= b
int log_star(double b);

// M_i = sqrt(m e^{*i} + m0), i < h
struct TetraLadder {
  double m = 1.0;
  double m0 = 0.0;
  std::uint32_t h = 1;

  TetraLadder() = default;
  TetraLadder(double m_, double m0_, std::uint32_t h_);

  double range(std::uint32_t i) const;
  unsigned index_bits() const { return ceil_log2(h); }
  // smallest j with max|y| <= M_j, else h-1
  std::uint32_t select(double abs_max) const;
};

struct AtuqResult {
  std::uint32_t j = 0;
  std::vector<std::uint32_t> symbols;
  std::vector<double> reconstruction;
};

AtuqResult atuq_quantize(std::span<const double> y, const TetraLadder& ladder, std::uint32_t k,
                         Stream& s);
std::vector<double> atuq_decode(std::uint32_t j, std::span<const std::uint32_t> symbols,
                                const TetraLadder& ladder, std::uint32_t k);

// Grid at range j; an infinite range is capped at the largest finite double
// so that every finite input is in range.
UniformGrid atuq_grid(const TetraLadder& ladder, std::uint32_t j, std::uint32_t k);

// M_{g,j} = B a^{j/2}, j < h
struct GeoLadder {
  double B = 1.0;
  double a = 2.0;
  std::uint32_t h = 1;

  GeoLadder() = default;
  GeoLadder(double B_, double a_, std::uint32_t h_);
  double range(std::uint32_t j) const;
};

struct AguqResult {
  std::uint32_t j = 0;
  std::uint32_t symbol = 0;  // k means overflow
  double reconstruction = 0.0;
};

AguqResult aguq_quantize(double g, const GeoLadder& ladder, std::uint32_t k, Stream& s);
double aguq_decode(std::uint32_t j, std::uint32_t symbol, const GeoLadder& ladder, std::uint32_t k);
unsigned aguq_bits(const GeoLadder& ladder, std::uint32_t k);
void aguq_write(BitString& out, const AguqResult& r, const GeoLadder& ladder, std::uint32_t k);
AguqResult aguq_read(BitReader& in, const GeoLadder& ladder, std::uint32_t k);

// Variable-length gain quantizer: unary range index, then a (j+1)-bit level
// field. Ranges below the top use all 2^{j+1} codes as levels; the top range
// reserves its all-ones code for overflow.
struct AguqPlus {
  GeoLadder ladder;

  AguqPlus(double B, std::uint64_t T);
  std::uint32_t levels(std::uint32_t j) const;
  std::uint32_t h() const { return ladder.h; }
};

struct AguqPlusResult {
  BitString bits;
  double reconstruction = 0.0;
};

AguqPlusResult aguq_plus_quantize(double g, const AguqPlus& q, Stream& s);
double aguq_plus_read(BitReader& in, const AguqPlus& q);

}  // namespace qtk
