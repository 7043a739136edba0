#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "qtk/adaptive.hpp"
#include "qtk/quantizer.hpp"
#include "qtk/scalar.hpp"

namespace qtk {

// ATUQ on consecutive s-blocks, no rotation, for subgaussian sources with
// variance factor v at per-coordinate distortion D < v/4:
//   m = 3v, m0 = 2v ln s, log h = ceil(log(1 + ln*(4 ln(8 sqrt2 v/D)/3))),
//   s = min(log h, d), log(k+1) = ceil(log(2 + sqrt((18v + 6v ln s)/D)))
struct GaussRdParams {
  std::size_t d = 0;
  double v = 1, D = 0;
  std::uint32_t s = 1, k = 2;
  TetraLadder ladder;

  static GaussRdParams make(std::size_t d, double v, double D);
  std::size_t bit_budget() const;
  double rate() const { return double(bit_budget()) / double(d); }
  double rd_function() const;  // 0.5 log2(v/D)
};

class GaussRdQuantizer final : public VectorQuantizer {
 public:
  explicit GaussRdQuantizer(GaussRdParams p) : P_(p) {}
  std::string name() const override { return "atuq-block"; }
  std::size_t dim() const override { return P_.d; }
  std::optional<std::size_t> bit_budget() const override { return P_.bit_budget(); }
  BitString encode(std::span<const double> x, std::span<const double> side,
                   const SeedPath& path) const override;
  Vec decode(const BitString& msg, std::span<const double> side,
             const SeedPath& path) const override;
  const GaussRdParams& params() const { return P_; }

 private:
  GaussRdParams P_;
};

// Coordinate-wise MQ with side information Y, X = Y + Z, Z subgaussian(sigma_z^2):
//   delta = sqrt(D/308), log k = ceil(log(2 + (sigma_z/sqrt D) 4 sqrt(3 ln(2 sqrt77 sigma_z/sqrt D)))),
//   Delta' = sqrt(6 sigma_z^2 ln(sigma_z/delta)), eps = 2 Delta'/(k-2)
struct GaussWzParams {
  std::size_t d = 0;
  double sigma_z = 1, D = 0, delta = 0;
  unsigned log_k = 0;
  ModuloParams mq;

  static GaussWzParams make(std::size_t d, double sigma_z, double D);
  std::size_t bit_budget() const { return d * log_k; }
  double rate() const { return double(log_k); }
  double rd_function() const;  // 0.5 log2(sigma_z^2/D)
};

class GaussWzQuantizer final : public VectorQuantizer {
 public:
  explicit GaussWzQuantizer(GaussWzParams p) : P_(p) {}
  std::string name() const override { return "mq-wz"; }
  std::size_t dim() const override { return P_.d; }
  std::optional<std::size_t> bit_budget() const override { return P_.bit_budget(); }
  BitString encode(std::span<const double> x, std::span<const double> side,
                   const SeedPath& path) const override;
  Vec decode(const BitString& msg, std::span<const double> side,
             const SeedPath& path) const override;
  const GaussWzParams& params() const { return P_; }

 private:
  GaussWzParams P_;
};

}  // namespace qtk
