#include "qtk/quantizer.hpp"

#include <bit>
#include <cmath>

#include "qtk/errors.hpp"

namespace qtk {

Vec VectorQuantizer::quantize(std::span<const double> x, std::span<const double> side,
                              const SeedPath& path, std::size_t* bits_used) const {
  BitString msg = encode(x, side, path);
  if (auto b = bit_budget(); b && msg.size() > *b)
    throw Error(name() + ": message of " + std::to_string(msg.size()) +
                " bits exceeds budget " + std::to_string(*b));
  if (bits_used) *bits_used = msg.size();
  return decode(msg, side, path);
}

BitString IdentityQuantizer::encode(std::span<const double> x, std::span<const double>,
                                    const SeedPath&) const {
  if (x.size() != d_) throw ParamError("identity: dimension mismatch");
  BitString b;
  for (double v : x) b.write_uint(std::bit_cast<std::uint64_t>(v), 64);
  return b;
}

Vec IdentityQuantizer::decode(const BitString& msg, std::span<const double>,
                              const SeedPath&) const {
  BitReader r(msg);
  Vec out(d_);
  for (auto& v : out) v = std::bit_cast<double>(r.read_uint(64));
  return out;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_p(std::span<const double> v, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (p == 2.0) return norm2(v);
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  if (mx == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x) / mx, p);
  return mx * std::pow(s, 1.0 / p);
}

double dist2_sq(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace qtk
