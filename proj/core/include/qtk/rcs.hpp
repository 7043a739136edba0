#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qtk/quantizer.hpp"

namespace qtk {

// A quantizer whose symbols decode coordinate by coordinate (in the rotated
// domain). The sampler below only ever hands it the sampled coordinates.
class CoordinateCodec {
 public:
  virtual ~CoordinateCodec() = default;
  virtual std::string name() const = 0;
  virtual std::size_t bits_for(std::size_t count) const = 0;
  // xr[t] is the value at coordinate coords[t]
  virtual void encode(std::span<const double> xr, std::span<const std::size_t> coords,
                      const SeedPath& path, BitString& out) const = 0;
  // yr[t] is the side value at coords[t] (zero without side information)
  virtual Vec decode(BitReader& in, std::span<const double> yr,
                     std::span<const std::size_t> coords, const SeedPath& path) const = 0;
};

enum class FillMode { ZeroFill, CenterOnSide };

// m distinct indices from [0,d), sorted; partial Fisher-Yates.
std::vector<std::size_t> sample_subset(Stream& s, std::size_t d, std::size_t m);

// Random coordinate sampler around a CoordinateCodec:
//   rotate (optional) -> keep mu*d shared-random coordinates -> codec
// ZeroFill:      out = (1/mu) sum_S decoded(i) e_i
// CenterOnSide:  out = y_R + (1/mu) sum_S (decoded(i) - y_R(i)) e_i
class RcsQuantizer : public VectorQuantizer {
 public:
  RcsQuantizer(std::size_t n, std::shared_ptr<const CoordinateCodec> codec, std::size_t mu_d,
               FillMode mode, bool rotate, std::string name);

  std::string name() const override { return name_; }
  std::size_t dim() const override { return n_; }
  std::optional<std::size_t> bit_budget() const override { return codec_->bits_for(mu_d_); }
  std::optional<double> alpha_bound() const override { return alpha_; }
  void set_alpha_bound(double a) { alpha_ = a; }
  // reject inputs (and side information) outside the l2 ball of this radius
  void set_input_bound(double r) { input_bound_ = r; }

  BitString encode(std::span<const double> x, std::span<const double> side,
                   const SeedPath& path) const override;
  Vec decode(const BitString& msg, std::span<const double> side,
             const SeedPath& path) const override;

  std::size_t padded_dim() const { return d_; }
  std::size_t sample_count() const { return mu_d_; }
  double mu() const { return static_cast<double>(mu_d_) / static_cast<double>(d_); }
  const CoordinateCodec& codec() const { return *codec_; }

 private:
  Vec to_inner(std::span<const double> v, const SeedPath& path) const;
  std::vector<std::size_t> subset(const SeedPath& path) const;

  std::size_t n_, d_;
  std::shared_ptr<const CoordinateCodec> codec_;
  std::size_t mu_d_;
  FillMode mode_;
  bool rotate_;
  std::string name_;
  std::optional<double> alpha_;
  std::optional<double> input_bound_;
};

}  // namespace qtk
