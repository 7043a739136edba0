#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qtk/random.hpp"

namespace qtk {

using Vec = std::vector<double>;

bool is_pow2(std::size_t n);
std::size_t next_pow2(std::size_t n);

struct SignDiagonal {
  std::vector<double> signs;  // entries are +1.0 / -1.0
  std::size_t dim() const { return signs.size(); }
};

SignDiagonal sample_signs(Stream& stream, std::size_t d);

// Unnormalized in-place Walsh-Hadamard butterfly.
void fwht(std::span<double> v);

// (1/sqrt d) H D y
Vec rotate(std::span<const double> y, const SignDiagonal& signs);
// exact inverse: D H z / sqrt d
Vec unrotate(std::span<const double> z, const SignDiagonal& signs);

struct Padded {
  Vec data;
  std::size_t original = 0;
};

Padded pad_to_pow2(std::span<const double> y);

}  // namespace qtk
