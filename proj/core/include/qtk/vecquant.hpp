#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qtk/adaptive.hpp"
#include "qtk/quantizer.hpp"
#include "qtk/rcs.hpp"

namespace qtk {

// ---- RATQ ------------------------------------------------------------------

struct RatqConfig {
  double B = 1.0;
  std::size_t n = 0;  // input dimension
  std::size_t d = 0;  // rotated (padded) dimension
  std::uint32_t s = 1;
  TetraLadder ladder;
  std::uint32_t k = 2;

  // m = 3B^2/d, m0 = (2B^2/d) ln s, log h = ceil(log(1 + ln*(d/3))),
  // s = log h, log(k+1) = ceil(log(2 + sqrt(9 + 3 ln s)))
  static RatqConfig defaults(std::size_t n, double B);

  std::size_t subvectors() const { return (d + s - 1) / s; }
  std::size_t bit_budget() const;
  double alpha_bound() const;  // B sqrt((9 + 3 ln s)/(k-1)^2 + 1)
};

class RatqQuantizer final : public VectorQuantizer {
 public:
  explicit RatqQuantizer(RatqConfig cfg);
  std::string name() const override { return "ratq"; }
  std::size_t dim() const override { return cfg_.n; }
  std::optional<std::size_t> bit_budget() const override { return cfg_.bit_budget(); }
  std::optional<double> alpha_bound() const override { return cfg_.alpha_bound(); }
  BitString encode(std::span<const double> x, std::span<const double> side,
                   const SeedPath& path) const override;
  Vec decode(const BitString& msg, std::span<const double> side,
             const SeedPath& path) const override;
  const RatqConfig& config() const { return cfg_; }

 private:
  RatqConfig cfg_;
};

// ATUQ applied to single coordinates (RATQ with s = 1) for the sampler.
// Layout: all range indices, then all level symbols.
class AtuqCoordCodec final : public CoordinateCodec {
 public:
  AtuqCoordCodec(TetraLadder ladder, std::uint32_t k) : ladder_(ladder), k_(k) {}
  std::string name() const override { return "atuq-coord"; }
  std::size_t bits_for(std::size_t count) const override;
  void encode(std::span<const double> xr, std::span<const std::size_t> coords,
              const SeedPath& path, BitString& out) const override;
  Vec decode(BitReader& in, std::span<const double> yr, std::span<const std::size_t> coords,
             const SeedPath& path) const override;

 private:
  TetraLadder ladder_;
  std::uint32_t k_;
};

struct SubsampledRatqParams {
  RatqConfig ratq;  // s = 1, k = 7
  std::size_t mu_d = 0;
};

// s = 1, log(k+1) = 3, mu d = min{d, floor(r / (3 + ceil(log(1 + ln*(d/3)))))}
SubsampledRatqParams subsampled_ratq_params(std::size_t n, double B, std::size_t r);
std::shared_ptr<RcsQuantizer> make_subsampled_ratq(std::size_t n, double B, std::size_t r);
std::shared_ptr<RcsQuantizer> make_subsampled_ratq(const SubsampledRatqParams& p);

// ---- A-RATQ (gain-shape) ---------------------------------------------------

struct AguqGain {
  GeoLadder ladder;
  std::uint32_t k = 2;
  double second_moment_factor() const;  // E[gain^2] <= B^2 * this
  double bias_bound() const;            // B^2 / M_{g,h-1}
};

// a_g = 2, log h_g = ceil(log(1 + log(T)/2)), log(k_g+1) = ceil(log(2 + sqrt(log T + 1)/2))
AguqGain aguq_high_precision(double B, std::uint64_t T);

class ARatqQuantizer final : public VectorQuantizer {
 public:
  // shape must be a quantizer for the unit l2 ball
  ARatqQuantizer(std::size_t n, double B, std::variant<AguqGain, AguqPlus> gain,
                 std::shared_ptr<const VectorQuantizer> shape);
  std::string name() const override;
  std::size_t dim() const override { return n_; }
  std::optional<std::size_t> bit_budget() const override;
  std::optional<double> alpha_bound() const override;
  BitString encode(std::span<const double> x, std::span<const double> side,
                   const SeedPath& path) const override;
  Vec decode(const BitString& msg, std::span<const double> side,
             const SeedPath& path) const override;
  std::optional<double> bias_bound() const;

 private:
  std::size_t n_;
  double B_;
  std::variant<AguqGain, AguqPlus> gain_;
  std::shared_ptr<const VectorQuantizer> shape_;
};

enum class GainMode { Aguq, AguqPlus };
std::shared_ptr<ARatqQuantizer> make_aratq(std::size_t n, double B, std::uint64_t T,
                                           GainMode mode);

// ---- SimQ / SimQ+ ----------------------------------------------------------

struct SimqDraw {
  std::int64_t index = 0;  // in {-d..d}; 0 means the zero vector, +-i means +-B e_i
};

// P(index = sign(y_i) i) = |y_i|/B
SimqDraw simq_draw(std::span<const double> y, double B, Stream& s);

class SimqQuantizer final : public VectorQuantizer {
 public:
  SimqQuantizer(std::size_t d, double B) : d_(d), B_(B) {}
  std::string name() const override { return "simq"; }
  std::size_t dim() const override { return d_; }
  std::optional<std::size_t> bit_budget() const override { return ceil_log2(2 * d_ + 1); }
  std::optional<double> alpha_bound() const override { return B_; }
  BitString encode(std::span<const double> x, std::span<const double> side,
                   const SeedPath& path) const override;
  Vec decode(const BitString& msg, std::span<const double> side,
             const SeedPath& path) const override;

 private:
  std::size_t d_;
  double B_;
};

// Average of k SimQ draws at scale B d^{1/p}; the message is the type of the
// k indices (lexicographic rank of the count composition) plus one sign per
// distinct nonzero index.
class SimqPlusQuantizer final : public VectorQuantizer {
 public:
  // p in [2, inf]; k = 0 picks the default ceil(d^{2/p})
  SimqPlusQuantizer(std::size_t d, double B, double p, std::size_t k = 0);
  ~SimqPlusQuantizer() override;
  std::string name() const override { return "simq+"; }
  std::size_t dim() const override { return d_; }
  std::optional<std::size_t> bit_budget() const override;
  std::optional<double> alpha_bound() const override;
  BitString encode(std::span<const double> x, std::span<const double> side,
                   const SeedPath& path) const override;
  Vec decode(const BitString& msg, std::span<const double> side,
             const SeedPath& path) const override;

  std::size_t repetitions() const { return k_; }
  double scale() const { return scale_; }
  unsigned type_bits() const { return type_bits_; }
  double budget_formula() const;  // k log e + k log(d/k + 1) + k
  double mse_bound() const;       // d^{2/p} B^2 / k

  // exposed for tests: composition <-> rank
  std::vector<std::uint32_t> unrank(const BitString& rank_bits) const;
  BitString rank(std::span<const std::uint32_t> counts) const;

 private:
  struct Binomials;
  std::size_t d_;
  double B_, p_;
  std::size_t k_;
  double scale_;
  unsigned type_bits_;
  std::unique_ptr<Binomials> binom_;
};

// ---- l_p split quantizer, p in [1,2] ---------------------------------------

struct LpSplitParams {
  double B = 1.0, p = 1.0, q = 0.0;  // q = p/(p-1), inf for p = 1
  std::size_t d = 0;
  std::uint32_t delta1 = 0, delta2 = 0;
  double c = 0.0;            // threshold B Delta1^{1/q} / d^{1/q}
  UniformGrid small;         // CUQ for Y1
  std::size_t d_large = 0;   // floor(d / Delta1), capacity for Y2'
  RatqConfig large;          // RATQ for Y2'
  static LpSplitParams make(std::size_t d, double B, double p);
};

class LpSplitQuantizer final : public VectorQuantizer {
 public:
  LpSplitQuantizer(std::size_t d, double B, double p);
  std::string name() const override { return "lp-split"; }
  std::size_t dim() const override { return P_.d; }
  std::optional<std::size_t> bit_budget() const override;
  std::optional<double> alpha_bound() const override;  // sqrt(12) B in l_q
  BitString encode(std::span<const double> x, std::span<const double> side,
                   const SeedPath& path) const override;
  Vec decode(const BitString& msg, std::span<const double> side,
             const SeedPath& path) const override;
  const LpSplitParams& params() const { return P_; }

 private:
  LpSplitParams P_;
  RatqQuantizer large_;
};

}  // namespace qtk
