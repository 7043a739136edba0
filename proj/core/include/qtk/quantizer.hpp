#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "qtk/bits.hpp"
#include "qtk/random.hpp"
#include "qtk/transform.hpp"

namespace qtk {

// Encoder/decoder pair. Both sides get the same SeedPath, which carries the
// shared randomness (rotation, sampled subset, dither uniforms). Encoder-only
// randomness is drawn from path.child(Tag::Private).
class VectorQuantizer {
 public:
  virtual ~VectorQuantizer() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  // Worst-case message length; nullopt for variable-length schemes.
  virtual std::optional<std::size_t> bit_budget() const = 0;
  // sqrt of the worst-case E||Q(Y)||^2 over admissible inputs, when known.
  virtual std::optional<double> alpha_bound() const { return std::nullopt; }

  virtual BitString encode(std::span<const double> x, std::span<const double> side,
                           const SeedPath& path) const = 0;
  virtual Vec decode(const BitString& msg, std::span<const double> side,
                     const SeedPath& path) const = 0;

  // encode + decode + budget assertion
  Vec quantize(std::span<const double> x, std::span<const double> side, const SeedPath& path,
               std::size_t* bits_used = nullptr) const;
};

// Sends raw IEEE doubles. Baseline for the optimization harness.
class IdentityQuantizer final : public VectorQuantizer {
 public:
  IdentityQuantizer(std::size_t d, double B) : d_(d), B_(B) {}
  std::string name() const override { return "identity"; }
  std::size_t dim() const override { return d_; }
  std::optional<std::size_t> bit_budget() const override { return 64 * d_; }
  std::optional<double> alpha_bound() const override { return B_; }
  BitString encode(std::span<const double> x, std::span<const double>,
                   const SeedPath&) const override;
  Vec decode(const BitString& msg, std::span<const double>, const SeedPath&) const override;

 private:
  std::size_t d_;
  double B_;
};

double norm2(std::span<const double> v);
double norm_p(std::span<const double> v, double p);  // p = inf allowed
double dist2_sq(std::span<const double> a, std::span<const double> b);

}  // namespace qtk
