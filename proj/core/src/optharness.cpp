#include "qtk/optharness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qtk {

namespace {

double dual_exponent(double a) { return a / (a - 1.0); }

void check_dim(std::size_t want, std::size_t got, const char* what) {
  if (want != got)
    throw ParamError(std::string(what) + ": dimension " + std::to_string(got) + ", expected " +
                     std::to_string(want));
}

void check_finite(const Vec& x, std::size_t t) {
  for (double v : x)
    if (!std::isfinite(v)) throw Error("optimizer diverged at step " + std::to_string(t));
}

}  // namespace

// ---- domains ---------------------------------------------------------------

L2Ball::L2Ball(std::size_t d, double R) : d_(d), R_(R) {
  if (d == 0 || !(R > 0)) throw ParamError("l2 ball: need d > 0 and R > 0");
}

void L2Ball::project(Vec& x) const {
  double n = norm2(x);
  if (n > R_)
    for (double& v : x) v *= R_ / n;
}

double L2Ball::min_linear(std::span<const double> c) const { return -R_ * norm2(c); }

bool L2Ball::contains(std::span<const double> x, double tol) const {
  return norm2(x) <= R_ * (1 + tol) + tol;
}

Box::Box(std::size_t d, double b) : d_(d), b_(b) {
  if (d == 0 || !(b > 0)) throw ParamError("box: need d > 0 and b > 0");
}

void Box::project(Vec& x) const {
  for (double& v : x) v = std::clamp(v, -b_, b_);
}

double Box::diameter() const { return 2 * b_ * std::sqrt(double(d_)); }

double Box::min_linear(std::span<const double> c) const {
  double s = 0;
  for (double v : c) s += std::abs(v);
  return -b_ * s;
}

bool Box::contains(std::span<const double> x, double tol) const {
  for (double v : x)
    if (std::abs(v) > b_ * (1 + tol) + tol) return false;
  return true;
}

LpBall::LpBall(std::size_t d, double a, double R) : d_(d), a_(a), R_(R) {
  if (d == 0 || !(R > 0) || !(a > 1.0) || !(a <= 2.0))
    throw ParamError("lp ball: need d > 0, R > 0, a in (1,2]");
}

void LpBall::project(Vec& x) const {
  double n = norm_p(x, a_);
  if (n > R_)
    for (double& v : x) v *= R_ / n;
}

double LpBall::min_linear(std::span<const double> c) const {
  return -R_ * norm_p(c, dual_exponent(a_));
}

bool LpBall::contains(std::span<const double> x, double tol) const {
  return norm_p(x, a_) <= R_ * (1 + tol) + tol;
}

// ---- oracles ---------------------------------------------------------------

QuadraticOracle::QuadraticOracle(Vec x0, double gamma, double sigma, double B)
    : x0_(std::move(x0)), gamma_(gamma), sigma_(sigma), B_(B) {
  if (x0_.empty() || !(gamma > 0) || sigma < 0 || !(B > 0))
    throw ParamError("quadratic oracle: bad parameters");
}

Vec QuadraticOracle::sample(std::span<const double> x, Stream& s) const {
  Vec g(x0_.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = gamma_ * (x[i] - x0_[i]);
  if (sigma_ > 0) {
    Vec u(g.size());
    double n = 0;
    while (n == 0) {
      for (double& v : u) v = s.normal();
      n = norm2(u);
    }
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += sigma_ * u[i] / n;
  }
  return g;
}

double QuadraticOracle::value(std::span<const double> x) const {
  return 0.5 * gamma_ * dist2_sq(x, x0_);
}

double QuadraticOracle::min_value(const Domain& dom) const {
  if (!dom.contains(x0_, 1e-12)) throw ParamError("quadratic oracle: minimizer outside domain");
  return 0.0;
}

LinearOracle::LinearOracle(Vec c, double q) : c_(std::move(c)), q_(q), B_(norm_p(c_, q)) {}

Vec LinearOracle::sample(std::span<const double>, Stream&) const { return c_; }

double LinearOracle::value(std::span<const double> x) const {
  return std::inner_product(c_.begin(), c_.end(), x.begin(), 0.0);
}

HardInstanceOracle::HardInstanceOracle(std::vector<int> v, double delta, double B, double p,
                                       double D)
    : v_(std::move(v)), delta_(delta), B_(B), p_(p) {
  if (v_.empty()) throw ParamError("hard instance: empty sign vector");
  for (int s : v_)
    if (s != 1 && s != -1) throw ParamError("hard instance: v must be in {-1,1}^d");
  if (!(delta >= 0 && delta <= 1.0 / 6.0)) throw ParamError("hard instance: need delta <= 1/6");
  if (!(p >= 1.0)) throw ParamError("hard instance: need p >= 1");
  const double d = double(v_.size());
  q_ = p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0);
  const double d1q = std::isinf(q_) ? 1.0 : std::pow(d, 1.0 / q_);
  b_ = D / (2.0 * std::pow(d, 1.0 / p));
  a_ = 2.0 * B * delta / d1q;
  mag_ = B / d1q;
}

Vec HardInstanceOracle::sample(std::span<const double>, Stream& s) const {
  Vec g(v_.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = s.uniform() < (1.0 + 2.0 * delta_ * v_[i]) / 2.0 ? -mag_ : mag_;
  return g;
}

double HardInstanceOracle::value(std::span<const double> x) const {
  double f = 0;
  for (std::size_t i = 0; i < v_.size(); ++i) f += std::abs(x[i] - v_[i] * b_);
  return a_ * f;
}

double HardInstanceOracle::min_value(const Domain& dom) const {
  if (!dom.contains(minimizer(), 1e-12)) throw ParamError("hard instance: minimizer outside domain");
  return 0.0;
}

Vec HardInstanceOracle::mean_gradient() const {
  Vec g(v_.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = -2.0 * delta_ * v_[i] * mag_;
  return g;
}

Vec HardInstanceOracle::minimizer() const {
  Vec x(v_.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = v_[i] * b_;
  return x;
}

// ---- runs ------------------------------------------------------------------

namespace {

// Shared loop. `step` mutates x given the decoded gradient and step index.
template <class Step>
OptResult run_loop(const GradientOracle& oracle, const VectorQuantizer& q, const Domain& dom,
                   Vec x, std::size_t T, bool weighted, std::uint64_t seed, bool keep_trace,
                   Step&& step) {
  check_dim(dom.dim(), x.size(), "start point");
  check_dim(dom.dim(), oracle.dim(), "oracle");
  check_dim(dom.dim(), q.dim(), "quantizer");
  if (T == 0) throw ParamError("optimizer: T must be positive");
  dom.project(x);
  const double fstar = oracle.min_value(dom);
  const SeedPath root(seed);
  const auto budget = q.bit_budget();

  OptResult r;
  Vec sum(x.size(), 0.0), avg(x.size());
  double wsum = 0;
  std::size_t bits = 0;
  if (keep_trace) {
    r.trace.reserve(T);
    r.bits_cum.reserve(T);
  }
  for (std::size_t t = 0; t < T; ++t) {
    double w = weighted ? double(t + 1) : 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum[i] += w * x[i];
    wsum += w;
    SeedPath p = root.child(Tag::Step, t);
    Stream os = p.child(Tag::Oracle).stream();
    Vec g = oracle.sample(x, os);
    SeedPath qp = p.child(Tag::Quant);
    BitString msg = q.encode(g, {}, qp);
    if (budget && msg.size() > *budget)
      throw Error("optimizer: quantizer exceeded its budget at step " + std::to_string(t));
    bits += msg.size();
    Vec gh = q.decode(msg, {}, qp);
    step(x, gh, t);
    check_finite(x, t);
    if (keep_trace) {
      for (std::size_t i = 0; i < x.size(); ++i) avg[i] = sum[i] / wsum;
      r.trace.push_back(oracle.value(avg) - fstar);
      r.bits_cum.push_back(bits);
    }
  }
  r.x_avg.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r.x_avg[i] = sum[i] / wsum;
  r.final_gap = oracle.value(r.x_avg) - fstar;
  r.steps = T;
  return r;
}

double resolve_alpha(const VectorQuantizer& q, const OptOptions& opt) {
  if (opt.alpha) return *opt.alpha;
  auto a = q.alpha_bound();
  if (!a) throw ParamError("optimizer: quantizer '" + q.name() + "' has no alpha bound");
  return *a;
}

}  // namespace

OptResult psgd_run(const GradientOracle& oracle, const VectorQuantizer& q, const Domain& dom,
                   Vec x0, std::size_t T, double gamma, std::uint64_t seed,
                   const OptOptions& opt) {
  if (gamma < 0) throw ParamError("psgd: gamma must be >= 0");
  if (gamma == 0) {
    double eta = opt.step ? *opt.step
                          : dom.diameter() / (resolve_alpha(q, opt) * std::sqrt(double(T)));
    return run_loop(oracle, q, dom, std::move(x0), T, false, seed, opt.keep_trace,
                    [&](Vec& x, const Vec& g, std::size_t) {
                      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * g[i];
                      dom.project(x);
                    });
  }
  return run_loop(oracle, q, dom, std::move(x0), T, true, seed, opt.keep_trace,
                  [&](Vec& x, const Vec& g, std::size_t t) {
                    double eta = 2.0 / (gamma * double(t + 2));
                    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * g[i];
                    dom.project(x);
                  });
}

double mirror_exponent(double p, std::size_t d) {
  if (!(p >= 1.0 && p <= 2.0)) throw ParamError("mirror descent: p must lie in [1,2]");
  if (d < 2) return 2.0;
  double l = 2.0 * std::log2(double(d));
  return std::min(2.0, std::max(p, l / (l - 1.0)));
}

void mirror_step(Vec& x, std::span<const double> g, double eta, const LpBall& dom) {
  const double a = dom.exponent();
  if (a == 2.0) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * g[i];
    dom.project(x);
    return;
  }
  const double b = dual_exponent(a);
  // theta = grad psi(x) - eta g
  Vec th(x.size(), 0.0);
  double nx = norm_p(x, a);
  if (nx > 0)
    for (std::size_t i = 0; i < x.size(); ++i)
      th[i] = nx * std::copysign(std::pow(std::abs(x[i]) / nx, a - 1.0), x[i]) / (a - 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) th[i] -= eta * g[i];
  // x = grad psi*(theta)
  double nt = norm_p(th, b);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = nt > 0 ? (a - 1.0) * nt * std::copysign(std::pow(std::abs(th[i]) / nt, b - 1.0), th[i])
                  : 0.0;
  dom.project(x);
}

OptResult mirror_descent_run(const GradientOracle& oracle, const VectorQuantizer& q,
                             const LpBall& dom, Vec x0, std::size_t T, std::uint64_t seed,
                             const OptOptions& opt) {
  const double a = dom.exponent();
  if (a == 2.0) {
    L2Ball ball(dom.dim(), dom.radius());
    return psgd_run(oracle, q, ball, std::move(x0), T, 0.0, seed, opt);
  }
  double eta = opt.step ? *opt.step
                        : dom.diameter() /
                              (resolve_alpha(q, opt) * std::sqrt(double(T) * (a - 1.0)));
  return run_loop(oracle, q, dom, std::move(x0), T, false, seed, opt.keep_trace,
                  [&](Vec& x, const Vec& g, std::size_t) { mirror_step(x, g, eta, dom); });
}

double one_bit_prob(double g, double B) {
  if (!(std::abs(g) <= B)) throw ContractViolation("1-bit quantizer: |g| exceeds B");
  return (g + B) / (2.0 * B);
}

Vec phase_estimate(const GradientOracle& oracle, std::span<const double> x, std::size_t r,
                   const SeedPath& phase_path) {
  const std::size_t d = oracle.dim();
  const double B = oracle.bound();
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Stream ps = phase_path.child(Tag::Subset).stream();
  for (std::size_t i = d; i > 1; --i) std::swap(perm[i - 1], perm[ps.below(i)]);
  Vec est(d, 0.0);
  const std::size_t queries = (d + r - 1) / r;
  for (std::size_t j = 0; j < queries; ++j) {
    SeedPath qp = phase_path.child(Tag::Rep, j);
    Stream os = qp.child(Tag::Oracle).stream();
    Vec g = oracle.sample(x, os);
    Stream qs = qp.child(Tag::Quant).stream();
    for (std::size_t t = j * r; t < std::min(d, (j + 1) * r); ++t) {
      std::size_t i = perm[t];
      est[i] = qs.uniform() < one_bit_prob(g[i], B) ? B : -B;
    }
  }
  return est;
}

PhaseResult l1_phase_scheme(const GradientOracle& oracle, std::size_t r, std::size_t T,
                            const LpBall& dom, Vec x, std::uint64_t seed, bool keep_trace) {
  const std::size_t d = oracle.dim();
  check_dim(dom.dim(), d, "oracle");
  check_dim(d, x.size(), "start point");
  if (r == 0 || r > d) throw ParamError("phase scheme: need 1 <= r <= d");
  PhaseResult pr;
  pr.queries_per_phase = (d + r - 1) / r;
  pr.phases = T / pr.queries_per_phase;
  if (pr.phases == 0) throw ParamError("phase scheme: T smaller than one phase");
  const double a = dom.exponent();
  const double B = oracle.bound();
  // ||est||_b with entries +-B
  const double G = B * std::pow(double(d), (a - 1.0) / a);
  const double eta = dom.diameter() / (G * std::sqrt(double(pr.phases) * (a - 1.0)));
  dom.project(x);
  const double fstar = oracle.min_value(dom);
  const SeedPath root(seed);
  Vec sum(d, 0.0), avg(d);
  OptResult& r_ = pr.run;
  for (std::size_t ph = 0; ph < pr.phases; ++ph) {
    for (std::size_t i = 0; i < d; ++i) sum[i] += x[i];
    Vec est = phase_estimate(oracle, x, r, root.child(Tag::Phase, ph));
    mirror_step(x, est, eta, dom);
    check_finite(x, ph);
    if (keep_trace) {
      for (std::size_t i = 0; i < d; ++i) avg[i] = sum[i] / double(ph + 1);
      r_.trace.push_back(oracle.value(avg) - fstar);
      r_.bits_cum.push_back((ph + 1) * d);
    }
  }
  r_.x_avg.resize(d);
  for (std::size_t i = 0; i < d; ++i) r_.x_avg[i] = sum[i] / double(pr.phases);
  r_.final_gap = oracle.value(r_.x_avg) - fstar;
  r_.steps = pr.phases;
  return pr;
}

}  // namespace qtk
