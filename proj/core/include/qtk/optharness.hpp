#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "qtk/errors.hpp"
#include "qtk/quantizer.hpp"
#include "qtk/random.hpp"

namespace qtk {

// ---- domains ---------------------------------------------------------------

class Domain {
 public:
  virtual ~Domain() = default;
  virtual std::size_t dim() const = 0;
  virtual void project(Vec& x) const = 0;
  virtual double diameter() const = 0;  // in the domain's own norm
  virtual double min_linear(std::span<const double> c) const = 0;  // min <c,x>
  virtual bool contains(std::span<const double> x, double tol = 1e-12) const = 0;
};

// ||x||_2 <= R, D = 2R
class L2Ball final : public Domain {
 public:
  L2Ball(std::size_t d, double R);
  std::size_t dim() const override { return d_; }
  void project(Vec& x) const override;
  double diameter() const override { return 2 * R_; }
  double min_linear(std::span<const double> c) const override;
  bool contains(std::span<const double> x, double tol) const override;
  double radius() const { return R_; }

 private:
  std::size_t d_;
  double R_;
};

// ||x||_inf <= b, Euclidean projection is clipping. D = 2b sqrt(d) in l2.
class Box final : public Domain {
 public:
  Box(std::size_t d, double b);
  std::size_t dim() const override { return d_; }
  void project(Vec& x) const override;
  double diameter() const override;
  double min_linear(std::span<const double> c) const override;
  bool contains(std::span<const double> x, double tol) const override;
  double half_width() const { return b_; }

 private:
  std::size_t d_;
  double b_;
};

// ||x||_a <= R. project() is radial scaling, which is the Bregman projection
// for mirror maps that depend on ||x||_a only. D = 2R in l_a.
class LpBall final : public Domain {
 public:
  LpBall(std::size_t d, double a, double R);
  std::size_t dim() const override { return d_; }
  void project(Vec& x) const override;
  double diameter() const override { return 2 * R_; }
  double min_linear(std::span<const double> c) const override;
  bool contains(std::span<const double> x, double tol) const override;
  double exponent() const { return a_; }
  double radius() const { return R_; }

 private:
  std::size_t d_;
  double a_, R_;
};

// ---- oracles ---------------------------------------------------------------

enum class NormModel { AlmostSure, MeanSquare };

class GradientOracle {
 public:
  virtual ~GradientOracle() = default;
  virtual std::size_t dim() const = 0;
  virtual Vec sample(std::span<const double> x, Stream& s) const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual double min_value(const Domain& dom) const = 0;
  virtual double bound() const = 0;  // B
  virtual double bound_norm() const { return 2.0; }  // q of the l_q bound
  virtual NormModel model() const { return NormModel::AlmostSure; }
};

// f(x) = (gamma/2)||x - x0||^2, gradient plus noise of norm exactly sigma in a
// uniform direction. B = gamma * (sup_dom ||x - x0||) + sigma, supplied by caller.
class QuadraticOracle final : public GradientOracle {
 public:
  QuadraticOracle(Vec x0, double gamma, double sigma, double B);
  std::size_t dim() const override { return x0_.size(); }
  Vec sample(std::span<const double> x, Stream& s) const override;
  double value(std::span<const double> x) const override;
  double min_value(const Domain& dom) const override;  // 0; x0 must lie in dom
  double bound() const override { return B_; }

 private:
  Vec x0_;
  double gamma_, sigma_, B_;
};

// f(x) = <c, x>, deterministic gradient c.
class LinearOracle final : public GradientOracle {
 public:
  LinearOracle(Vec c, double q);
  std::size_t dim() const override { return c_.size(); }
  Vec sample(std::span<const double> x, Stream& s) const override;
  double value(std::span<const double> x) const override;
  double min_value(const Domain& dom) const override { return dom.min_linear(c_); }
  double bound() const override { return B_; }
  double bound_norm() const override { return q_; }

 private:
  Vec c_;
  double q_, B_;
};

// g_v(x) = a sum_i |x(i) - v(i) b| on the box ||x||_inf <= b, with
// b = D/(2 d^{1/p}), a = 2 B delta / d^{1/q}. The oracle ignores x: coordinate i
// is -B/d^{1/q} w.p. (1 + 2 delta v(i))/2, else +B/d^{1/q}.
class HardInstanceOracle final : public GradientOracle {
 public:
  HardInstanceOracle(std::vector<int> v, double delta, double B, double p, double D);
  std::size_t dim() const override { return v_.size(); }
  Vec sample(std::span<const double> x, Stream& s) const override;
  double value(std::span<const double> x) const override;
  double min_value(const Domain& dom) const override;
  double bound() const override { return B_; }
  double bound_norm() const override { return q_; }
  Vec mean_gradient() const;  // -2 B delta v / d^{1/q}
  Vec minimizer() const;      // v b
  Box domain() const { return Box(v_.size(), b_); }
  double magnitude() const { return mag_; }  // B / d^{1/q}

 private:
  std::vector<int> v_;
  double delta_, B_, p_, q_, b_, a_, mag_;
};

// ---- runs ------------------------------------------------------------------

struct OptOptions {
  bool keep_trace = true;
  std::optional<double> alpha;  // overrides the quantizer's theoretical bound
  std::optional<double> step;   // constant step override
};

struct OptResult {
  Vec x_avg;
  double final_gap = 0.0;      // f(x_avg) - f*
  std::vector<double> trace;   // f(running average) - f* after each step
  std::vector<std::size_t> bits_cum;
  std::size_t steps = 0;
};

// Iterates x_{t+1} = Pi(x_t - eta_t Q(g(x_t))), t = 0..T-1.
// gamma = 0: eta = D/(alpha sqrt T), output (1/T) sum_{t<T} x_t.
// gamma > 0: eta_t = 2/(gamma (t+2)), output weighted by (t+1).
// Oracle noise from path(Step,t).child(Oracle), quantizer from path(Step,t).child(Quant).
OptResult psgd_run(const GradientOracle& oracle, const VectorQuantizer& q, const Domain& dom,
                   Vec x0, std::size_t T, double gamma, std::uint64_t seed,
                   const OptOptions& opt = {});

// exponent of the mirror map for target p in [1,2]: max(p, 2 log d/(2 log d - 1))
double mirror_exponent(double p, std::size_t d);

// Mirror map psi(x) = ||x||_a^2 / (2(a-1)) on dom (an l_a ball).
// eta = D/(alpha sqrt(T (a-1))) with alpha the l_b bound on quantized gradients.
// a = 2 runs the PSGD path exactly.
OptResult mirror_descent_run(const GradientOracle& oracle, const VectorQuantizer& q,
                             const LpBall& dom, Vec x0, std::size_t T, std::uint64_t seed,
                             const OptOptions& opt = {});

// One mirror step in place: x <- Pi(grad psi*(grad psi(x) - eta g)).
void mirror_step(Vec& x, std::span<const double> g, double eta, const LpBall& dom);

// P(+B) for the 1-bit unbiased quantizer of g in [-B, B]
double one_bit_prob(double g, double B);

struct PhaseResult {
  OptResult run;
  std::size_t phases = 0;
  std::size_t queries_per_phase = 0;
};

// T oracle queries in total, ceil(d/r) per phase; each query sends r coords
// (the last one of a phase may send fewer) at one bit each.
PhaseResult l1_phase_scheme(const GradientOracle& oracle, std::size_t r, std::size_t T,
                            const LpBall& dom, Vec x0, std::uint64_t seed,
                            bool keep_trace = true);

// The phase's assembled gradient estimate at x (exposed for tests).
Vec phase_estimate(const GradientOracle& oracle, std::span<const double> x, std::size_t r,
                   const SeedPath& phase_path);

}  // namespace qtk
