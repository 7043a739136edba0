#include "qtk/sideinfo.hpp"

#include <cmath>

#include "qtk/adaptive.hpp"
#include "qtk/errors.hpp"

namespace qtk {

// ---- RMQ -------------------------------------------------------------------

RmqConfig RmqConfig::make(std::size_t n, double Delta, double delta, std::uint32_t k) {
  if (n == 0) throw ParamError("rmq: dimension must be positive");
  if (k < 4) throw ParamError("rmq: k must be >= 4, got " + std::to_string(k));
  if (Delta < 0) throw ParamError("rmq: Delta must be >= 0");
  RmqConfig c;
  c.n = n;
  c.d = next_pow2(n);
  c.Delta = Delta;
  c.delta = delta;
  if (Delta == 0.0) {
    c.mq = ModuloParams::with_default_eps(k, 0.0);
    return c;
  }
  if (!(delta > 0 && delta < Delta)) throw ParamError("rmq: delta must lie in (0, Delta)");
  double dp = std::sqrt(6.0 * (Delta * Delta / double(c.d)) * std::log(Delta / delta));
  c.mq = ModuloParams::with_default_eps(k, dp);
  return c;
}

double RmqConfig::mse_bound() const {
  if (Delta == 0.0) return 0.0;
  double km2 = mq.k - 2.0;
  return 24.0 * Delta * Delta * std::log(Delta / delta) / (km2 * km2) + 154.0 * delta * delta;
}

void MqCodec::encode(std::span<const double> xr, std::span<const std::size_t>,
                     const SeedPath& path, BitString& out) const {
  Stream s = path.child(Tag::Private).stream();
  const unsigned b = p_.symbol_bits();
  for (double v : xr) out.write_field(mq_encode(v, p_, s).w, b);
}

Vec MqCodec::decode(BitReader& in, std::span<const double> yr, std::span<const std::size_t>,
                    const SeedPath&) const {
  const unsigned b = p_.symbol_bits();
  Vec out(yr.size());
  for (std::size_t t = 0; t < out.size(); ++t)
    out[t] = mq_decode(static_cast<std::uint32_t>(in.read_field(b)), yr[t], p_);
  return out;
}

std::shared_ptr<RcsQuantizer> make_wz_known(const RmqConfig& cfg, std::size_t mu_d) {
  auto codec = std::make_shared<MqCodec>(cfg.mq);
  return std::make_shared<RcsQuantizer>(cfg.n, codec, mu_d, FillMode::CenterOnSide, true,
                                        mu_d == cfg.d ? "rmq" : "wz-known");
}

std::shared_ptr<RcsQuantizer> make_rmq(const RmqConfig& cfg) { return make_wz_known(cfg, cfg.d); }

std::size_t rmq_violations(std::span<const double> x, std::span<const double> y,
                           const RmqConfig& cfg, const SeedPath& path) {
  Padded px = pad_to_pow2(x), py = pad_to_pow2(y);
  Stream s = path.child(Tag::Rotation).stream();
  SignDiagonal D = sample_signs(s, cfg.d);
  Vec rx = rotate(px.data, D), ry = rotate(py.data, D);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < cfg.d; ++i)
    if (std::abs(rx[i] - ry[i]) > cfg.mq.delta_prime) ++bad;
  return bad;
}

// ---- DAQ -------------------------------------------------------------------

namespace {
Stream uniform_stream(const SeedPath& path, std::size_t coord, std::uint32_t scale) {
  return path.child(Tag::Uniform).child(Tag::Coord, coord).child(Tag::Scale, scale).stream();
}
}  // namespace

void DaqCodec::encode(std::span<const double> xr, std::span<const std::size_t> coords,
                      const SeedPath& path, BitString& out) const {
  for (std::size_t t = 0; t < xr.size(); ++t) {
    Stream u = uniform_stream(path, coords[t], 0);
    out.push_bit(u.uniform(-1.0, 1.0) <= xr[t]);
  }
}

Vec DaqCodec::decode(BitReader& in, std::span<const double> yr,
                     std::span<const std::size_t> coords, const SeedPath& path) const {
  Vec out(yr.size());
  for (std::size_t t = 0; t < yr.size(); ++t) {
    Stream u = uniform_stream(path, coords[t], 0);
    double w = in.read_bit() ? 1.0 : 0.0;
    double yt = u.uniform(-1.0, 1.0) <= yr[t] ? 1.0 : 0.0;
    out[t] = 2.0 * (w - yt) + yr[t];
  }
  return out;
}

std::shared_ptr<RcsQuantizer> make_daq(std::size_t n) {
  auto q = std::make_shared<RcsQuantizer>(n, std::make_shared<DaqCodec>(), n,
                                          FillMode::CenterOnSide, false, "daq");
  q->set_input_bound(1.0);
  return q;
}

// ---- RDAQ ------------------------------------------------------------------

RdaqConfig RdaqConfig::make(std::size_t n, std::uint32_t N) {
  if (n == 0) throw ParamError("rdaq: dimension must be positive");
  if (N < 1) throw ParamError("rdaq: repetitions must be >= 1");
  RdaqConfig c;
  c.n = n;
  c.d = next_pow2(n);
  double ratio = double(c.d) / 6.0;
  int ls = ratio <= 1.0 ? 0 : log_star(ratio);
  c.h = 1u << ceil_log2(static_cast<std::uint64_t>(1 + ls));
  if (c.h > 4) throw ParamError("rdaq: dimension too large for the scale ladder");
  c.N = N;
  return c;
}

double RdaqConfig::range(std::uint32_t j) const {
  return std::sqrt(6.0 * tetration(static_cast<int>(j)) / double(d));
}

double RdaqConfig::mse_bound(double Delta) const { return 16.0 * std::sqrt(3.0) * Delta / N; }

std::uint32_t RdaqCodec::scale_of(double v) const {
  double a = std::abs(v);
  for (std::uint32_t j = 0; j < cfg_.h; ++j)
    if (a <= cfg_.range(j)) return j;
  return cfg_.h - 1;
}

void RdaqCodec::encode(std::span<const double> xr, std::span<const std::size_t> coords,
                       const SeedPath& path, BitString& out) const {
  const unsigned ib = cfg_.index_bits(), cb = cfg_.count_bits();
  for (double v : xr) out.write_field(scale_of(v), ib);
  // plane-major: all coordinates at scale 0, then scale 1, ...
  for (std::uint32_t j = 0; j < cfg_.h; ++j) {
    const double M = cfg_.range(j);
    for (std::size_t t = 0; t < xr.size(); ++t) {
      Stream u = uniform_stream(path, coords[t], j);
      std::uint32_t c = 0;
      for (std::uint32_t r = 0; r < cfg_.N; ++r) c += u.uniform(-M, M) <= xr[t];
      out.write_uint(c, cb);
    }
  }
}

Vec RdaqCodec::decode(BitReader& in, std::span<const double> yr,
                      std::span<const std::size_t> coords, const SeedPath& path) const {
  const unsigned ib = cfg_.index_bits(), cb = cfg_.count_bits();
  const std::size_t m = yr.size();
  std::vector<std::uint32_t> z(m);
  for (auto& v : z) {
    v = static_cast<std::uint32_t>(in.read_field(ib));
    if (v >= cfg_.h) throw MalformedStream("rdaq: scale index out of range");
  }
  std::vector<std::uint32_t> counts(std::size_t{cfg_.h} * m);
  for (auto& c : counts) {
    c = static_cast<std::uint32_t>(in.read_uint(cb));
    if (c > cfg_.N) throw MalformedStream("rdaq: indicator count exceeds N");
  }
  Vec out(m);
  for (std::size_t t = 0; t < m; ++t) {
    std::uint32_t zs = std::max(z[t], scale_of(yr[t]));
    const double M = cfg_.range(zs);
    Stream u = uniform_stream(path, coords[t], zs);
    std::uint32_t cy = 0;
    for (std::uint32_t r = 0; r < cfg_.N; ++r) cy += u.uniform(-M, M) <= yr[t];
    double cx = counts[std::size_t{zs} * m + t];
    out[t] = 2.0 * M * (cx - double(cy)) / double(cfg_.N) + yr[t];
  }
  return out;
}

std::shared_ptr<RcsQuantizer> make_wz_unknown(const RdaqConfig& cfg, std::size_t mu_d) {
  std::string name = cfg.N > 1 ? "boosted-rdaq" : (mu_d == cfg.d ? "rdaq" : "wz-unknown");
  auto q = std::make_shared<RcsQuantizer>(cfg.n, std::make_shared<RdaqCodec>(cfg), mu_d,
                                          FillMode::CenterOnSide, true, name);
  q->set_input_bound(1.0);
  return q;
}

std::shared_ptr<RcsQuantizer> make_rdaq(const RdaqConfig& cfg) {
  return make_wz_unknown(cfg, cfg.d);
}

std::uint32_t boosted_repetitions(const RdaqConfig& base, std::size_t m) {
  std::size_t need = base.h + base.index_bits();
  if (m < need)
    throw ParamError("boosted rdaq: per-coordinate budget m=" + std::to_string(m) +
                     " below h + log h = " + std::to_string(need));
  std::size_t e = (m - base.index_bits()) / base.h;
  if (e > 30) throw ParamError("boosted rdaq: repetition count overflows");
  return 1u << e;
}

std::shared_ptr<RcsQuantizer> make_boosted_rdaq(std::size_t n, std::size_t m) {
  RdaqConfig cfg = RdaqConfig::make(n);
  cfg.N = boosted_repetitions(cfg, m);
  return make_rdaq(cfg);
}

}  // namespace qtk
