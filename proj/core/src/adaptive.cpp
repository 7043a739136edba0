#include "qtk/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qtk/errors.hpp"

namespace qtk {

double tetration(int i) {
  if (i < 0) throw ParamError("tetration: negative index");
  if (i > 5) throw ParamError("tetration: index " + std::to_string(i) + " overflows (max 5)");
  double v = 1.0;
  for (int t = 0; t < i; ++t) v = std::exp(v);  // exp(huge) -> inf
  return v;
}

int log_star(double b) {
  if (!(b > 0.0)) throw ParamError("log_star: argument must be positive");
  int i = 0;
  while (tetration(i) < b) ++i;  // e^{*4} is +inf, so this stops by i = 4
  return i;
}

TetraLadder::TetraLadder(double m_, double m0_, std::uint32_t h_) : m(m_), m0(m0_), h(h_) {
  if (h < 1) throw ParamError("TetraLadder: h must be >= 1");
  if (h > 6) throw ParamError("TetraLadder: h=" + std::to_string(h) + " needs e^{*i} for i > 5");
  if (!(m > 0.0) || m0 < 0.0) throw ParamError("TetraLadder: need m > 0 and m0 >= 0");
}

double TetraLadder::range(std::uint32_t i) const {
  double t = tetration(static_cast<int>(i));
  if (std::isinf(t)) return std::numeric_limits<double>::infinity();
  return std::sqrt(m * t + m0);
}

std::uint32_t TetraLadder::select(double abs_max) const {
  for (std::uint32_t j = 0; j < h; ++j)
    if (abs_max <= range(j)) return j;
  return h - 1;
}

UniformGrid atuq_grid(const TetraLadder& ladder, std::uint32_t j, std::uint32_t k) {
  double M = ladder.range(j);
  if (std::isinf(M)) M = 1e300;
  return UniformGrid(M, k, GridMode::Signed);
}

AtuqResult atuq_quantize(std::span<const double> y, const TetraLadder& ladder, std::uint32_t k,
                         Stream& s) {
  double mx = 0.0;
  for (double v : y) mx = std::max(mx, std::abs(v));
  AtuqResult r;
  r.j = ladder.select(mx);
  UniformGrid g = atuq_grid(ladder, r.j, k);
  r.symbols = cuq_encode(y, g, s);
  r.reconstruction = cuq_decode(r.symbols, g);
  return r;
}

std::vector<double> atuq_decode(std::uint32_t j, std::span<const std::uint32_t> symbols,
                                const TetraLadder& ladder, std::uint32_t k) {
  if (j >= ladder.h) throw MalformedStream("atuq_decode: range index out of range");
  return cuq_decode(symbols, atuq_grid(ladder, j, k));
}

GeoLadder::GeoLadder(double B_, double a_, std::uint32_t h_) : B(B_), a(a_), h(h_) {
  if (!(B > 0.0)) throw ParamError("GeoLadder: B must be positive");
  if (!(a > 1.0)) throw ParamError("GeoLadder: growth ratio must exceed 1");
  if (h < 1) throw ParamError("GeoLadder: h must be >= 1");
}

double GeoLadder::range(std::uint32_t j) const { return B * std::pow(a, 0.5 * j); }

AguqResult aguq_quantize(double g, const GeoLadder& ladder, std::uint32_t k, Stream& s) {
  if (g < 0) throw ContractViolation("aguq: gain must be nonnegative");
  AguqResult r;
  if (g > ladder.range(ladder.h - 1)) {
    r.j = ladder.h - 1;
    r.symbol = k;
    r.reconstruction = 0.0;
    return r;
  }
  while (g > ladder.range(r.j)) ++r.j;
  UniformGrid grid(ladder.range(r.j), k, GridMode::Nonnegative);
  r.symbol = cuq_encode_one(g, grid, s);
  r.reconstruction = cuq_decode_one(r.symbol, grid);
  return r;
}

double aguq_decode(std::uint32_t j, std::uint32_t symbol, const GeoLadder& ladder, std::uint32_t k) {
  if (j >= ladder.h) throw MalformedStream("aguq: range index out of range");
  if (symbol > k) throw MalformedStream("aguq: level symbol out of range");
  return cuq_decode_one(symbol, UniformGrid(ladder.range(j), k, GridMode::Nonnegative));
}

unsigned aguq_bits(const GeoLadder& ladder, std::uint32_t k) {
  return ceil_log2(ladder.h) + ceil_log2(std::uint64_t{k} + 1);
}

void aguq_write(BitString& out, const AguqResult& r, const GeoLadder& ladder, std::uint32_t k) {
  out.write_field(r.j, ceil_log2(ladder.h));
  out.write_field(r.symbol, ceil_log2(std::uint64_t{k} + 1));
}

AguqResult aguq_read(BitReader& in, const GeoLadder& ladder, std::uint32_t k) {
  AguqResult r;
  r.j = static_cast<std::uint32_t>(in.read_field(ceil_log2(ladder.h)));
  r.symbol = static_cast<std::uint32_t>(in.read_field(ceil_log2(std::uint64_t{k} + 1)));
  r.reconstruction = aguq_decode(r.j, r.symbol, ladder, k);
  return r;
}

AguqPlus::AguqPlus(double B, std::uint64_t T) {
  if (T < 2) throw ParamError("aguq+: horizon T must be >= 2");
  auto h = 1 + static_cast<std::uint32_t>(std::ceil(0.5 * std::log2(static_cast<double>(T))));
  if (h > 31) throw ParamError("aguq+: horizon too large");
  ladder = GeoLadder(B, 2.0, h);
}

std::uint32_t AguqPlus::levels(std::uint32_t j) const {
  std::uint32_t codes = 1u << (j + 1);
  return j + 1 == ladder.h ? codes - 1 : codes;
}

AguqPlusResult aguq_plus_quantize(double g, const AguqPlus& q, Stream& s) {
  if (g < 0) throw ContractViolation("aguq+: gain must be nonnegative");
  AguqPlusResult out;
  const std::uint32_t top = q.h() - 1;
  std::uint32_t j = 0;
  std::uint32_t sym;
  if (g > q.ladder.range(top)) {
    j = top;
    sym = q.levels(top);  // all-ones code
  } else {
    while (g > q.ladder.range(j)) ++j;
    UniformGrid grid(q.ladder.range(j), q.levels(j), GridMode::Nonnegative);
    sym = cuq_encode_one(g, grid, s);
    out.reconstruction = cuq_decode_one(sym, grid);
  }
  for (std::uint32_t t = 0; t < j; ++t) out.bits.push_bit(true);
  out.bits.push_bit(false);
  out.bits.write_uint(sym, j + 1);
  return out;
}

double aguq_plus_read(BitReader& in, const AguqPlus& q) {
  std::uint32_t j = 0;
  while (in.read_bit()) {
    ++j;
    if (j >= q.h()) throw MalformedStream("aguq+: unary range index too long");
  }
  auto sym = static_cast<std::uint32_t>(in.read_uint(j + 1));
  std::uint32_t k = q.levels(j);
  if (sym > k || (sym == k && j + 1 != q.h())) throw MalformedStream("aguq+: bad level code");
  return cuq_decode_one(sym, UniformGrid(q.ladder.range(j), k, GridMode::Nonnegative));
}

}  // namespace qtk
