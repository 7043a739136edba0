#include "qtk/scalar.hpp"

#include <algorithm>
#include <cmath>

#include "qtk/errors.hpp"

namespace qtk {

UniformGrid::UniformGrid(double M_, std::uint32_t k_, GridMode mode_) : M(M_), k(k_), mode(mode_) {
  if (k < 2) throw ParamError("UniformGrid: k must be >= 2");
  if (!(M > 0.0)) throw ParamError("UniformGrid: M must be positive");
}

CellDraw cuq_cell(double y, const UniformGrid& g) {
  CellDraw c;
  if (!(y <= g.M && y >= g.lo())) {
    c.overflow = true;
    return c;
  }
  double t = (y - g.lo()) / g.spacing();
  if (t <= 0.0) return c;  // left endpoint -> symbol 0
  // y in (B(l), B(l+1)]  <=>  l < t <= l+1
  double l = std::ceil(t) - 1.0;
  if (l < 0) l = 0;
  if (l > g.k - 2) l = g.k - 2;
  c.low = static_cast<std::uint32_t>(l);
  c.p_up = std::clamp(t - l, 0.0, 1.0);
  return c;
}

std::uint32_t cuq_encode_one(double y, const UniformGrid& g, Stream& s) {
  CellDraw c = cuq_cell(y, g);
  if (c.overflow) return g.empty_symbol();
  if (c.p_up >= 1.0) return c.low + 1;
  if (c.p_up <= 0.0) return c.low;
  return s.uniform() < c.p_up ? c.low + 1 : c.low;
}

double cuq_decode_one(std::uint32_t sym, const UniformGrid& g) {
  if (sym == g.empty_symbol()) return 0.0;
  if (sym > g.k) throw MalformedStream("cuq_decode: symbol " + std::to_string(sym) + " >= k+1");
  return g.level(sym);
}

std::vector<std::uint32_t> cuq_encode(std::span<const double> y, const UniformGrid& g, Stream& s) {
  std::vector<std::uint32_t> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = cuq_encode_one(y[i], g, s);
  return out;
}

std::vector<double> cuq_decode(std::span<const std::uint32_t> sym, const UniformGrid& g) {
  std::vector<double> out(sym.size());
  for (std::size_t i = 0; i < sym.size(); ++i) out[i] = cuq_decode_one(sym[i], g);
  return out;
}

double cuq_expected(double y, const UniformGrid& g) {
  CellDraw c = cuq_cell(y, g);
  if (c.overflow) return 0.0;
  return (1.0 - c.p_up) * g.level(c.low) + c.p_up * g.level(c.low + 1);
}

double cuq_mse(double y, const UniformGrid& g) {
  CellDraw c = cuq_cell(y, g);
  if (c.overflow) return y * y;
  double a = g.level(c.low) - y, b = g.level(c.low + 1) - y;
  return (1.0 - c.p_up) * a * a + c.p_up * b * b;
}

ModuloParams ModuloParams::with_default_eps(std::uint32_t k, double delta_prime) {
  if (k < 3) throw ParamError("modulo quantizer: k >= 3 required for eps = 2D'/(k-2), got k=" +
                              std::to_string(k));
  if (delta_prime < 0) throw ParamError("modulo quantizer: delta' must be >= 0");
  ModuloParams p;
  p.k = k;
  p.delta_prime = delta_prime;
  p.eps = 2.0 * delta_prime / (k - 2);
  return p;
}

namespace {
std::uint32_t coset(std::int64_t z, std::uint32_t k) {
  std::int64_t r = z % static_cast<std::int64_t>(k);
  if (r < 0) r += k;
  return static_cast<std::uint32_t>(r);
}
}  // namespace

MqEncoded mq_encode(double x, const ModuloParams& p, Stream& s) {
  MqEncoded e;
  if (p.eps <= 0.0) return e;  // degenerate: decoder falls back to side info
  double t = x / p.eps;
  double fl = std::floor(t);
  double frac = t - fl;
  auto z = static_cast<std::int64_t>(fl);
  if (frac > 0.0 && s.uniform() < frac) ++z;
  e.z = z;
  e.w = coset(z, p.k);
  return e;
}

double mq_decode(std::uint32_t w, double y_side, const ModuloParams& p) {
  if (w >= p.k) throw MalformedStream("mq_decode: coset symbol out of range");
  if (p.eps <= 0.0) return y_side;
  const double k = p.k;
  double zc = std::round((y_side / p.eps - w) / k);
  double best = 0.0, best_dist = INFINITY;
  for (double z = zc - 1; z <= zc + 1; z += 1) {
    double v = (z * k + w) * p.eps;
    double dist = std::abs(v - y_side);
    // ties go to the smaller point; candidates are visited in increasing order
    if (dist < best_dist) {
      best = v;
      best_dist = dist;
    }
  }
  return best;
}

MqResult mq_quantize(double x, double y_side, const ModuloParams& p, Stream& s) {
  MqEncoded e = mq_encode(x, p, s);
  return {e.w, mq_decode(e.w, y_side, p)};
}

}  // namespace qtk
