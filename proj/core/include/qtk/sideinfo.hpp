#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "qtk/rcs.hpp"
#include "qtk/scalar.hpp"

namespace qtk {

// ---- RMQ / subsampled RMQ (known Delta) ------------------------------------

struct RmqConfig {
  std::size_t n = 0, d = 0;  // input and rotated dimension
  double Delta = 0.0;        // ||x - y||_2 <= Delta
  double delta = 0.0;        // bias knob in (0, Delta)
  ModuloParams mq;           // k, Delta' = sqrt(6 (Delta^2/d) ln(Delta/delta)), eps

  // Delta = 0 gives a degenerate config whose decoder returns the side info.
  static RmqConfig make(std::size_t n, double Delta, double delta, std::uint32_t k);
  double mse_bound() const;  // 24 Delta^2 ln(Delta/delta)/(k-2)^2 + 154 delta^2
};

class MqCodec final : public CoordinateCodec {
 public:
  explicit MqCodec(ModuloParams p) : p_(p) {}
  std::string name() const override { return "mq"; }
  std::size_t bits_for(std::size_t count) const override { return count * p_.symbol_bits(); }
  void encode(std::span<const double> xr, std::span<const std::size_t> coords,
              const SeedPath& path, BitString& out) const override;
  Vec decode(BitReader& in, std::span<const double> yr, std::span<const std::size_t> coords,
             const SeedPath& path) const override;

 private:
  ModuloParams p_;
};

std::shared_ptr<RcsQuantizer> make_rmq(const RmqConfig& cfg);
std::shared_ptr<RcsQuantizer> make_wz_known(const RmqConfig& cfg, std::size_t mu_d);

// rotated coordinates with |Rx(i) - Ry(i)| > Delta'
std::size_t rmq_violations(std::span<const double> x, std::span<const double> y,
                           const RmqConfig& cfg, const SeedPath& path);

// ---- DAQ / RDAQ ------------------------------------------------------------

class DaqCodec final : public CoordinateCodec {
 public:
  std::string name() const override { return "daq"; }
  std::size_t bits_for(std::size_t count) const override { return count; }
  void encode(std::span<const double> xr, std::span<const std::size_t> coords,
              const SeedPath& path, BitString& out) const override;
  Vec decode(BitReader& in, std::span<const double> yr, std::span<const std::size_t> coords,
             const SeedPath& path) const override;
};

// d-bit correlated-sampling quantizer on the unit ball, no rotation
std::shared_ptr<RcsQuantizer> make_daq(std::size_t n);

struct RdaqConfig {
  std::size_t n = 0, d = 0;
  std::uint32_t h = 1;      // number of scales, log h = ceil(log(1 + ln*(d/6)))
  std::uint32_t N = 1;      // indicator repetitions (boosting)

  static RdaqConfig make(std::size_t n, std::uint32_t N = 1);
  double range(std::uint32_t j) const;  // M_j = sqrt(6 e^{*j} / d)
  unsigned index_bits() const { return ceil_log2(h); }
  unsigned count_bits() const { return ceil_log2(std::uint64_t{N} + 1); }
  std::size_t bits_per_coord() const { return index_bits() + h * count_bits(); }
  double mse_bound(double Delta) const;  // 16 sqrt(3) Delta / N
};

class RdaqCodec final : public CoordinateCodec {
 public:
  explicit RdaqCodec(RdaqConfig cfg) : cfg_(cfg) {}
  std::string name() const override { return "rdaq"; }
  std::size_t bits_for(std::size_t count) const override { return count * cfg_.bits_per_coord(); }
  void encode(std::span<const double> xr, std::span<const std::size_t> coords,
              const SeedPath& path, BitString& out) const override;
  Vec decode(BitReader& in, std::span<const double> yr, std::span<const std::size_t> coords,
             const SeedPath& path) const override;

 private:
  std::uint32_t scale_of(double v) const;
  RdaqConfig cfg_;
};

std::shared_ptr<RcsQuantizer> make_rdaq(const RdaqConfig& cfg);
std::shared_ptr<RcsQuantizer> make_wz_unknown(const RdaqConfig& cfg, std::size_t mu_d);
// N from the per-coordinate budget m: N = 2^{floor((m - ceil(log h))/h)}
std::shared_ptr<RcsQuantizer> make_boosted_rdaq(std::size_t n, std::size_t m);
std::uint32_t boosted_repetitions(const RdaqConfig& base, std::size_t m);

}  // namespace qtk
