#include "qtk/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "qtk/errors.hpp"

namespace qtk {

GaussRdParams GaussRdParams::make(std::size_t d, double v, double D) {
  if (d == 0) throw ParamError("gaussian rd: d must be positive");
  if (!(v > 0)) throw ParamError("gaussian rd: v must be positive");
  if (!(D > 0 && D < v / 4)) throw ParamError("gaussian rd: needs 0 < D < v/4");
  GaussRdParams p;
  p.d = d;
  p.v = v;
  p.D = D;
  double arg = 4.0 * std::log(8.0 * std::sqrt(2.0) * v / D) / 3.0;
  int ls = arg <= 1.0 ? 0 : log_star(arg);
  unsigned log_h = ceil_log2(static_cast<std::uint64_t>(1 + ls));
  if (log_h > d) throw ParamError("gaussian rd: needs d >= log h");
  std::uint32_t h = 1u << log_h;
  p.s = std::max<std::uint32_t>(1, std::min<std::uint32_t>(log_h, static_cast<std::uint32_t>(d)));
  double lns = std::log(double(p.s));
  p.ladder = TetraLadder(3.0 * v, 2.0 * v * lns, h);
  double lk = std::ceil(std::log2(2.0 + std::sqrt((18.0 * v + 6.0 * v * lns) / D)));
  if (lk > 31) throw ParamError("gaussian rd: distortion too small");
  p.k = (1u << static_cast<unsigned>(lk)) - 1;
  return p;
}

std::size_t GaussRdParams::bit_budget() const {
  std::size_t blocks = (d + s - 1) / s;
  return blocks * ladder.index_bits() + d * ceil_log2(std::uint64_t{k} + 1);
}

double GaussRdParams::rd_function() const { return 0.5 * std::log2(v / D); }

BitString GaussRdQuantizer::encode(std::span<const double> x, std::span<const double>,
                                   const SeedPath& path) const {
  if (x.size() != P_.d) throw ParamError("atuq-block: dimension mismatch");
  Stream priv = path.child(Tag::Private).stream();
  const std::size_t nb = (P_.d + P_.s - 1) / P_.s;
  BitString idx, sym;
  const unsigned sb = ceil_log2(std::uint64_t{P_.k} + 1);
  for (std::size_t b = 0; b < nb; ++b) {
    std::size_t lo = b * P_.s, hi = std::min(P_.d, lo + P_.s);
    AtuqResult r = atuq_quantize(x.subspan(lo, hi - lo), P_.ladder, P_.k, priv);
    idx.write_field(r.j, P_.ladder.index_bits());
    for (auto s : r.symbols) sym.write_uint(s, sb);
  }
  idx.append(sym);
  return idx;
}

Vec GaussRdQuantizer::decode(const BitString& msg, std::span<const double>,
                             const SeedPath&) const {
  BitReader in(msg);
  const std::size_t nb = (P_.d + P_.s - 1) / P_.s;
  const unsigned sb = ceil_log2(std::uint64_t{P_.k} + 1);
  std::vector<std::uint32_t> js(nb);
  for (auto& j : js) j = static_cast<std::uint32_t>(in.read_field(P_.ladder.index_bits()));
  Vec out(P_.d);
  for (std::size_t b = 0; b < nb; ++b) {
    if (js[b] >= P_.ladder.h) throw MalformedStream("atuq-block: range index out of range");
    UniformGrid g = atuq_grid(P_.ladder, js[b], P_.k);
    std::size_t lo = b * P_.s, hi = std::min(P_.d, lo + P_.s);
    for (std::size_t i = lo; i < hi; ++i)
      out[i] = cuq_decode_one(static_cast<std::uint32_t>(in.read_uint(sb)), g);
  }
  return out;
}

GaussWzParams GaussWzParams::make(std::size_t d, double sigma_z, double D) {
  if (d == 0) throw ParamError("gaussian wz: d must be positive");
  if (!(sigma_z > 0)) throw ParamError("gaussian wz: sigma_z must be positive");
  if (!(D > 0 && D <= sigma_z * sigma_z / 308.0))
    throw ParamError("gaussian wz: needs 0 < D <= sigma_z^2/308");
  GaussWzParams p;
  p.d = d;
  p.sigma_z = sigma_z;
  p.D = D;
  p.delta = std::sqrt(D / 308.0);
  const double r = sigma_z / std::sqrt(D);
  double lk = std::ceil(
      std::log2(2.0 + r * 4.0 * std::sqrt(3.0 * std::log(2.0 * std::sqrt(77.0) * r))));
  if (lk > 31) throw ParamError("gaussian wz: distortion too small");
  p.log_k = static_cast<unsigned>(lk);
  double dp = std::sqrt(6.0 * sigma_z * sigma_z * std::log(sigma_z / p.delta));
  p.mq = ModuloParams::with_default_eps(1u << p.log_k, dp);
  return p;
}

double GaussWzParams::rd_function() const { return 0.5 * std::log2(sigma_z * sigma_z / D); }

BitString GaussWzQuantizer::encode(std::span<const double> x, std::span<const double>,
                                   const SeedPath& path) const {
  if (x.size() != P_.d) throw ParamError("mq-wz: dimension mismatch");
  Stream priv = path.child(Tag::Private).stream();
  BitString out;
  for (double v : x) out.write_uint(mq_encode(v, P_.mq, priv).w, P_.log_k);
  return out;
}

Vec GaussWzQuantizer::decode(const BitString& msg, std::span<const double> side,
                             const SeedPath&) const {
  if (side.size() != P_.d) throw ParamError("mq-wz: decoder needs side information");
  BitReader in(msg);
  Vec out(P_.d);
  for (std::size_t i = 0; i < P_.d; ++i)
    out[i] = mq_decode(static_cast<std::uint32_t>(in.read_uint(P_.log_k)), side[i], P_.mq);
  return out;
}

}  // namespace qtk
