#include "qtk/transform.hpp"

#include <bit>
#include <cmath>

#include "qtk/errors.hpp"

namespace qtk {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) { return n <= 1 ? 1 : std::bit_ceil(n); }

SignDiagonal sample_signs(Stream& stream, std::size_t d) {
  if (!is_pow2(d)) throw ParamError("sample_signs: d=" + std::to_string(d) + " is not a power of two");
  SignDiagonal D;
  D.signs.resize(d);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if ((i & 63) == 0) word = stream.next();
    D.signs[i] = (word >> (i & 63)) & 1u ? -1.0 : 1.0;
  }
  return D;
}

void fwht(std::span<double> v) {
  const std::size_t n = v.size();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        double a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

namespace {
void check_dims(std::size_t n, const SignDiagonal& s) {
  if (n != s.dim())
    throw ParamError("dimension mismatch: vector " + std::to_string(n) + " vs signs " +
                     std::to_string(s.dim()));
}
}  // namespace

Vec rotate(std::span<const double> y, const SignDiagonal& signs) {
  check_dims(y.size(), signs);
  Vec out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = signs.signs[i] * y[i];
  fwht(out);
  const double s = 1.0 / std::sqrt(static_cast<double>(y.size()));
  for (auto& v : out) v *= s;
  return out;
}

Vec unrotate(std::span<const double> z, const SignDiagonal& signs) {
  check_dims(z.size(), signs);
  Vec out(z.begin(), z.end());
  fwht(out);
  const double s = 1.0 / std::sqrt(static_cast<double>(z.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s * signs.signs[i];
  return out;
}

Padded pad_to_pow2(std::span<const double> y) {
  Padded p;
  p.original = y.size();
  p.data.assign(next_pow2(y.size()), 0.0);
  std::copy(y.begin(), y.end(), p.data.begin());
  return p;
}

}  // namespace qtk
