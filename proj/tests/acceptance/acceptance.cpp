// Acceptance checks. `qtk_acceptance` runs all of them; `qtk_acceptance 7`
// runs one. One PASS/FAIL line per criterion, exit status 1 if any failed.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "qtk/aoi.hpp"
#include "qtk/dme.hpp"
#include "qtk/errors.hpp"
#include "qtk/gaussian.hpp"
#include "qtk/optharness.hpp"
#include "qtk/scalar.hpp"
#include "qtk/sideinfo.hpp"
#include "qtk/stats.hpp"
#include "qtk/vecquant.hpp"

using namespace qtk;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "FAILED " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Vec unit_vec(std::size_t d, std::uint64_t seed, double radius = 1.0) {
  Stream s(seed);
  Vec v(d);
  for (auto& x : v) x = s.normal();
  double n = norm2(v);
  for (auto& x : v) x *= radius / n;
  return v;
}

double sq(std::span<const double> v) {
  double a = 0;
  for (double x : v) a += x * x;
  return a;
}

Pmf random_pmf(std::size_t n, std::uint64_t seed) {
  Stream s(seed);
  Pmf P(n);
  double tot = 0;
  for (auto& p : P) tot += (p = 0.02 + s.uniform());
  for (auto& p : P) p /= tot;
  return P;
}

// ---- 1 ---------------------------------------------------------------------

Outcome c01() {
  Outcome o;
  double worst = 0;
  for (auto [M, k] : {std::pair{1.0, 2u}, {1.0, 5u}, {2.0, 9u}}) {
    UniformGrid g(M, k);
    for (int i = 0; i < 1000; ++i) {
      double y = -M + 2 * M * i / 999.0;
      CellDraw c = cuq_cell(y, g);
      double lo = cuq_decode_one(c.low, g);
      double e = lo;
      if (c.p_up > 0) e = (1 - c.p_up) * lo + c.p_up * cuq_decode_one(c.low + 1, g);
      worst = std::max(worst, std::abs(e - y));
    }
  }
  o.check(worst <= 1e-12, "max |E[decode] - y| = " + fmt("%.3g", worst));
  if (o.pass) o.note("max |E[decode] - y| = " + fmt("%.3g", worst));
  return o;
}

// ---- 2 ---------------------------------------------------------------------

Outcome c02() {
  Outcome o;
  std::size_t recov = 0, clamp = 0, cases = 0;
  Stream s(2);
  for (std::uint32_t k : {4u, 5u, 8u, 16u, 64u}) {
    for (double dp : {0.1, 1.0, 7.5}) {
      auto p = ModuloParams::with_default_eps(k, dp);
      for (int xi = -2000; xi <= 2000; xi += 3) {
        double x = xi * dp / 200;
        double t = x / p.eps;
        for (double z : {std::floor(t), std::ceil(t)}) {
          auto zi = static_cast<std::int64_t>(z);
          auto w = static_cast<std::uint32_t>(((zi % std::int64_t{k}) + k) % k);
          for (int di = -40; di <= 40; ++di) {
            double y = x + di * dp / 40;
            double rec = mq_decode(w, y, p);
            ++cases;
            if (!(std::abs(rec - x) < p.eps + 1e-12)) ++recov;
            if (!(std::abs(rec - y) <= k * p.eps + 1e-9)) ++clamp;
          }
        }
      }
      // arbitrary side information, far outside Delta'
      for (int t = 0; t < 20000; ++t) {
        double x = s.uniform(-100, 100), y = s.uniform(-100, 100);
        auto r = mq_quantize(x, y, p, s);
        ++cases;
        if (!(std::abs(r.reconstruction - y) <= k * p.eps + 1e-9)) ++clamp;
      }
    }
  }
  o.check(recov == 0, std::to_string(recov) + " recovery violations");
  o.check(clamp == 0, std::to_string(clamp) + " clamp violations");
  o.note(std::to_string(cases) + " cases");
  return o;
}

// ---- 3 ---------------------------------------------------------------------

Outcome c03() {
  Outcome o;
  const std::size_t d = 128, trials = 100000;
  RatqQuantizer q(RatqConfig::defaults(d, 1.0));
  const double bound = std::pow(*q.alpha_bound(), 2);
  // candidates: spikes, flat vectors, and random directions
  std::vector<Vec> ys;
  for (std::size_t j : {0u, 1u, 77u}) {
    Vec e(d, 0.0);
    e[j] = 1.0;
    ys.push_back(e);
  }
  ys.push_back(Vec(d, 1.0 / std::sqrt(double(d))));
  {
    Vec a(d);
    for (std::size_t i = 0; i < d; ++i) a[i] = (i % 2 ? -1.0 : 1.0) / std::sqrt(double(d));
    ys.push_back(a);
    Vec h(d, 0.0);
    for (std::size_t i = 0; i < d / 2; ++i) h[i] = 1.0 / std::sqrt(d / 2.0);
    ys.push_back(h);
  }
  for (std::uint64_t s = 0; ys.size() < 20; ++s) ys.push_back(unit_vec(d, 1000 + s));

  double worst_ratio = 0, worst_bias = 0;
  SeedPath root(3);
  for (std::size_t v = 0; v < ys.size(); ++v) {
    const Vec& y = ys[v];
    RunningStats m2;
    VectorStats st(d);
    SeedPath vp = root.child(Tag::Input, v);
    for (std::size_t t = 0; t < trials; ++t) {
      Vec out = q.quantize(y, {}, vp.child(Tag::Trial, t));
      m2.add(sq(out));
      st.add(out);
    }
    o.check(m2.mean() <= bound + 3 * m2.stderr_mean(),
            "vector " + std::to_string(v) + " second moment " + fmt("%.4f", m2.mean()));
    worst_ratio = std::max(worst_ratio, m2.mean() / bound);
    // ||mean - y||^2 ~ sum_i sigma_i^2 Z_i^2 / N
    auto mean = st.mean();
    auto se = st.stderr_mean();
    double err = 0, s2 = 0, s4 = 0;
    for (std::size_t i = 0; i < d; ++i) {
      err += (mean[i] - y[i]) * (mean[i] - y[i]);
      s2 += se[i] * se[i];
      s4 += std::pow(se[i], 4);
    }
    double band = s2 + 4 * std::sqrt(2 * s4);
    o.check(err <= band, "vector " + std::to_string(v) + " bias");
    worst_bias = std::max(worst_bias, std::sqrt(err / band));
  }
  o.note("bound " + fmt("%.4f", bound) + ", worst E||Q||^2/bound " + fmt("%.4f", worst_ratio) +
         ", worst bias/band " + fmt("%.3f", worst_bias));
  return o;
}

// ---- 4 ---------------------------------------------------------------------

Outcome c04() {
  Outcome o;
  const std::size_t d = 256;
  auto cfg = RatqConfig::defaults(d, 1.0);
  RatqQuantizer q(cfg);
  const unsigned D1 = ceil_log2(std::uint64_t{cfg.k} + 1);
  const unsigned D2 = cfg.ladder.index_bits();
  const std::size_t limit = d * (1 + D1) + D2;
  std::size_t worst = 0, bad = 0;
  SeedPath root(4);
  for (std::size_t t = 0; t < 20000; ++t) {
    double r = (t % 10) / 9.0;
    Vec y = unit_vec(d, t, r);
    if (t % 97 == 0) std::fill(y.begin(), y.end(), 0.0);
    BitString m = q.encode(y, {}, root.child(Tag::Trial, t));
    worst = std::max(worst, m.size());
    if (m.size() > limit || m.size() != cfg.bit_budget()) ++bad;
  }
  o.check(bad == 0, std::to_string(bad) + " messages over the limit");
  o.check(limit <= 1026, "limit " + std::to_string(limit));
  o.note("Delta1=" + std::to_string(D1) + " Delta2=" + std::to_string(D2) + " limit " +
         std::to_string(limit) + ", longest " + std::to_string(worst));
  return o;
}

// ---- 5 ---------------------------------------------------------------------

Outcome c05() {
  Outcome o;
  // SimQ: enumerate the three outcomes of y = (0.3, -0.2, 0)
  {
    const double B = 1.0;
    SimqQuantizer q(3, B);
    Vec y{0.3, -0.2, 0.0};
    double l1 = norm_p(y, 1.0);
    Vec e(3, 0.0);
    double mass = 0;
    auto add = [&](std::int64_t idx, double prob) {
      BitString m;
      m.write_uint(static_cast<std::uint64_t>(idx + 3), ceil_log2(7));
      Vec r = q.decode(m, {}, SeedPath(0));
      for (int i = 0; i < 3; ++i) e[i] += prob * r[i];
      mass += prob;
    };
    add(1, std::abs(y[0]) / B);
    add(-2, std::abs(y[1]) / B);
    add(0, 1 - l1 / B);
    double err = std::abs(e[0] - y[0]) + std::abs(e[1] - y[1]) + std::abs(e[2] - y[2]);
    o.check(err <= 1e-12 && std::abs(mass - 1) <= 1e-12, "SimQ enumeration");
    // the sampler puts mass where the enumeration says
    Stream s(5);
    int hits[3] = {0, 0, 0};
    const int N = 100000;
    for (int t = 0; t < N; ++t) {
      auto dr = simq_draw(y, B, s);
      hits[dr.index == 1 ? 0 : dr.index == -2 ? 1 : 2]++;
    }
    double sd = std::sqrt(0.25 / N);
    o.check(std::abs(hits[0] / double(N) - 0.3) < 5 * sd && std::abs(hits[1] / double(N) - 0.2) < 5 * sd,
            "SimQ sampler frequencies");
    o.note("SimQ |E - y|_1 = " + fmt("%.2g", err));
  }
  // SimQ+
  {
    const std::size_t d = 64;
    SimqPlusQuantizer q(d, 1.0, 2.0, 64);
    Vec y = unit_vec(d, 55);
    RunningStats mse;
    std::size_t longest = 0;
    SeedPath root(5);
    for (std::size_t t = 0; t < 10000; ++t) {
      SeedPath p = root.child(Tag::Trial, t);
      BitString m = q.encode(y, {}, p);
      longest = std::max(longest, m.size());
      mse.add(dist2_sq(q.decode(m, {}, p), y));
    }
    o.check(mse.mean() <= q.mse_bound() + 3 * mse.stderr_mean(), "SimQ+ MSE " + fmt("%.4f", mse.mean()));
    o.check(double(longest) <= q.budget_formula(), "SimQ+ length " + std::to_string(longest));
    o.note("SimQ+ MSE " + fmt2("%.4f (bound %.1f)", mse.mean(), q.mse_bound()) + ", longest " +
           std::to_string(longest) + " <= " + fmt("%.1f", q.budget_formula()));
  }
  return o;
}

// ---- 6 ---------------------------------------------------------------------

Outcome c06() {
  Outcome o;
  const std::size_t n = 100, d = 256, r = 32;
  DmeInstance I;
  I.n = n;
  I.d = d;
  I.r = r;
  for (std::size_t i = 0; i < n; ++i) {
    double D = i % 2 ? 1.0 : 0.1;
    Vec y = unit_vec(d, 600 + i, 0.5);
    Vec u = unit_vec(d, 9000 + i, D);
    Vec x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = y[j] + u[j];
    I.x.push_back(x);
    I.y.push_back(y);
    I.Delta.push_back(D);
  }
  auto plan = configure_known_delta(n, d, r, I.Delta);
  auto qs = build(plan);
  auto res = run_dme(I, [&](std::size_t i) { return qs[i]; }, 6, 10000);
  double bound = theoretical_bound(DmeSetting::Known, n, d, r, I.Delta);
  o.check(res.mse <= bound + res.band, "MSE above bound");
  o.check(res.max_bits <= r, "client used " + std::to_string(res.max_bits) + " bits");
  o.note("MSE " + fmt2("%.5f +- %.5f", res.mse, res.band) + ", bound " + fmt("%.4f", bound) +
         ", log k " + std::to_string(plan.log_k) + ", mu d " + std::to_string(plan.mu_d));
  return o;
}

// ---- 7 ---------------------------------------------------------------------

std::pair<Vec, Vec> pair_at(std::size_t d, double Delta, std::uint64_t seed) {
  Vec w = unit_vec(d, seed + 1, Delta / 2);
  Vec c = unit_vec(d, seed, 1.0);
  double proj = 0;
  for (std::size_t i = 0; i < d; ++i) proj += c[i] * w[i];
  for (std::size_t i = 0; i < d; ++i) c[i] -= proj / (Delta * Delta / 4) * w[i];
  double nc = norm2(c);
  Vec x(d), y(d);
  for (std::size_t i = 0; i < d; ++i) {
    x[i] = 0.3 * c[i] / nc + w[i];
    y[i] = 0.3 * c[i] / nc - w[i];
  }
  return {x, y};
}

Outcome c07() {
  Outcome o;
  const std::size_t d = 64, trials = 10000;
  auto cfg = RdaqConfig::make(d);
  auto q = make_rdaq(cfg);
  std::vector<double> lx, ly;
  std::string row;
  for (double D : {0.01, 0.1, 1.0}) {
    auto [x, y] = pair_at(d, D, 70);
    RunningStats st;
    SeedPath root(7);
    for (std::size_t t = 0; t < trials; ++t) st.add(dist2_sq(q->quantize(x, y, root.child(Tag::Trial, t)), x));
    o.check(st.mean() <= cfg.mse_bound(D) + 3 * st.stderr_mean(), "MSE at Delta=" + fmt("%g", D));
    lx.push_back(std::log10(D));
    ly.push_back(std::log10(st.mean()));
    row += fmt2(" %g:%.3g", D, st.mean());
  }
  double slope = ls_slope(lx, ly);
  o.check(std::abs(slope - 1.0) <= 0.15, "slope " + fmt("%.3f", slope));
  o.note("MSE" + row + ", slope " + fmt("%.3f", slope));

  auto [x, y] = pair_at(d, 0.5, 71);
  std::vector<double> m;
  for (std::uint32_t N : {1u, 2u, 4u, 8u}) {
    auto b = make_rdaq(RdaqConfig::make(d, N));
    RunningStats st;
    SeedPath root(8 + N);
    for (std::size_t t = 0; t < trials; ++t) st.add(dist2_sq(b->quantize(x, y, root.child(Tag::Trial, t)), x));
    m.push_back(st.mean());
  }
  std::string ratios;
  for (std::size_t i = 1; i < m.size(); ++i) {
    double r = m[i] / m[i - 1];
    o.check(std::abs(r - 0.5) <= 0.1, "boosted ratio " + fmt("%.3f", r));
    ratios += fmt(" %.3f", r);
  }
  o.note("boosted ratios" + ratios);
  return o;
}

// ---- 8 ---------------------------------------------------------------------

Outcome c08() {
  Outcome o;
  const std::size_t n = 10, d = 256;
  DmeInstance I;
  I.n = n;
  I.d = d;
  for (std::size_t i = 0; i < n; ++i) I.x.push_back(unit_vec(d, 800 + i));
  double prev = INFINITY, prev_band = 0;
  std::string row;
  for (std::size_t r : {16u, 32u, 64u}) {
    I.r = r;
    auto q = make_subsampled_ratq(d, 1.0, r);
    auto res = run_dme(I, [&](std::size_t) { return q; }, 8 + r, 10000);
    double bound = theoretical_bound(DmeSetting::NoSide, n, d, r, {});
    o.check(res.mse <= bound + res.band, "r=" + std::to_string(r) + " above bound");
    o.check(res.max_bits <= r, "r=" + std::to_string(r) + " budget");
    o.check(res.mse <= prev + res.band + prev_band, "r=" + std::to_string(r) + " not monotone");
    prev = res.mse;
    prev_band = res.band;
    row += " r=" + std::to_string(r) + fmt2(":%.3f/%.2f", res.mse, bound);
  }
  o.note("MSE/bound" + row);
  return o;
}

// ---- 9 ---------------------------------------------------------------------

// Laplace(b) truncated to [-T, T]; exponential tails in the body, bounded so
// it is subgaussian. Variance factor sup_l 2 ln E e^{lX} / l^2 in closed form.
constexpr double kLapB = 0.70710678118654752, kLapT = 3.0;

double truncated_laplace_variance_factor() {
  const double a = 1 / kLapB;
  const double Z = 2 * kLapB * -std::expm1(-kLapT * a);
  auto side = [&](double c) { return std::abs(c) < 1e-12 ? kLapT : -std::expm1(-kLapT * c) / c; };
  double best = 0;
  for (int i = 1; i <= 20000; ++i) {
    double l = 0.005 * i;
    double M = (side(a - l) + side(a + l)) / Z;
    best = std::max(best, 2 * std::log(M) / (l * l));
  }
  return best;
}

Outcome c09() {
  Outcome o;
  const double vf = truncated_laplace_variance_factor();
  o.check(vf <= 1.0, "truncated Laplace variance factor " + fmt("%.3f", vf));
  const std::size_t d = 4096, blocks = 1000;
  const double v = 1.0, D = 1.0 / 16;
  auto P = GaussRdParams::make(d, v, D);
  GaussRdQuantizer q(P);
  o.check(P.rate() <= P.rd_function() + 6, "rate " + fmt("%.2f", P.rate()));
  for (int laplace = 0; laplace < 2; ++laplace) {
    RunningStats mse;
    Stream src(9 + laplace);
    SeedPath root(90 + laplace);
    Vec x(d);
    for (std::size_t b = 0; b < blocks; ++b) {
      for (auto& xi : x) {
        if (laplace) {
          do {
            double u = src.uniform() - 0.5;
            xi = -(u < 0 ? -1.0 : 1.0) * kLapB * std::log(1 - 2 * std::abs(u));
          } while (std::abs(xi) > kLapT);
        } else {
          xi = src.normal();
        }
      }
      std::size_t used = 0;
      Vec y = q.quantize(x, {}, root.child(Tag::Trial, b), &used);
      if (used != P.bit_budget()) o.check(false, "block length");
      mse.add(dist2_sq(x, y) / double(d));
    }
    const char* name = laplace ? "trunc-laplace" : "gauss";
    o.check(mse.mean() <= D, std::string(name) + " MSE " + fmt("%.4f", mse.mean()));
    o.note(std::string(name) + " MSE/dim " + fmt("%.5f", mse.mean()));
  }
  o.note("rate " + fmt2("%.2f <= %.2f", P.rate(), P.rd_function() + 6) +
         ", trunc-laplace variance factor " + fmt("%.3f", vf));
  return o;
}

// ---- 10 --------------------------------------------------------------------

Outcome c10() {
  Outcome o;
  const std::size_t d = 4096, blocks = 200;
  const double sz = 0.1, D = sz * sz / 400;
  auto P = GaussWzParams::make(d, sz, D);
  GaussWzQuantizer q(P);
  RunningStats mse;
  Stream src(10);
  SeedPath root(10);
  Vec x(d), y(d);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t i = 0; i < d; ++i) {
      y[i] = src.normal();
      x[i] = y[i] + sz * src.normal();
    }
    mse.add(dist2_sq(x, q.quantize(x, y, root.child(Tag::Trial, b))));
  }
  o.check(mse.mean() <= d * D, "MSE " + fmt("%.4g", mse.mean()));
  o.check(P.rate() <= P.rd_function() + 8, "rate");
  o.note("MSE " + fmt2("%.4g <= dD = %.4g", mse.mean(), d * D) + ", rate " +
         fmt2("%.0f <= %.2f", P.rate(), P.rd_function() + 8));
  return o;
}

// ---- 11 --------------------------------------------------------------------

Outcome c11() {
  Outcome o;
  const std::size_t d = 32, T = 4096, reps = 50;
  const double sigma = 0.5;
  Vec x0(d, 0.0);
  x0[0] = 0.3;
  Vec start(d, 0.0);
  start[1] = -1.0;
  L2Ball dom(d, 1.0);
  const double D = dom.diameter();
  {
    const double B = 1.3 + sigma;  // sup ||x - x0|| = 1.3
    QuadraticOracle f(x0, 1.0, sigma, B);
    RatqQuantizer q(RatqConfig::defaults(d, B));
    RunningStats gap;
    for (std::size_t s = 0; s < reps; ++s)
      gap.add(psgd_run(f, q, dom, start, T, 0.0, 1100 + s, {.keep_trace = false}).final_gap);
    double bound = std::sqrt(2.0) * D * B / std::sqrt(double(T));
    o.check(gap.mean() <= 1.2 * bound, "convex gap " + fmt("%.4g", gap.mean()));
    o.note("convex gap " + fmt2("%.4g vs %.4g", gap.mean(), 1.2 * bound));
  }
  {
    const double gamma = 1.0, B = gamma * 1.3 + sigma;
    QuadraticOracle f(x0, gamma, sigma, B);
    RatqQuantizer q(RatqConfig::defaults(d, B));
    RunningStats gap;
    for (std::size_t s = 0; s < reps; ++s)
      gap.add(psgd_run(f, q, dom, start, T, gamma, 1200 + s, {.keep_trace = false}).final_gap);
    double bound = 2 * B * B / (gamma * T);
    o.check(gap.mean() <= 1.5 * bound, "strongly convex gap " + fmt("%.4g", gap.mean()));
    o.note("strongly convex gap " + fmt2("%.4g vs %.4g", gap.mean(), 1.5 * bound));
  }
  return o;
}

// ---- 12 --------------------------------------------------------------------

std::vector<unsigned> as_uint(const std::vector<double>& l) {
  std::vector<unsigned> u;
  for (double v : l) u.push_back(static_cast<unsigned>(std::lround(v)));
  return u;
}

Outcome c12() {
  Outcome o;
  double worst = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Pmf P = random_pmf(2 + (s * 7) % 40, 1200 + s);
    auto L = shannon_lengths(P, LengthMode::Integer);
    auto code = build_prefix_code(as_uint(L));
    auto r = simulate_update_scheme(code, P, 1000000, s);
    double z = std::abs(r.age - average_age(L, P)) / r.ci;
    worst = std::max(worst, z);
    o.check(z <= 3, "pair " + std::to_string(s) + fmt(" off by %.2f CI", z));
  }
  auto code = build_prefix_code(std::vector<unsigned>(8, 3));
  auto r = simulate_update_scheme(code, Pmf(8, 0.125), 1000000, 99);
  o.check(std::abs(r.age - 4.0) <= 0.05, "constant length " + fmt("%.4f", r.age));
  o.note("worst deviation " + fmt("%.2f", worst) + " CI, constant length c=3: " + fmt("%.4f", r.age));
  return o;
}

// ---- 13 --------------------------------------------------------------------

double age_real(const Pmf& from, const Pmf& P) {
  return average_age(shannon_lengths(from, LengthMode::Real), P);
}

Outcome c13() {
  Outcome o;
  double worst_gap = 0;
  std::string row;
  for (int i = 0; i <= 10; ++i) {
    double s = 0.5 * i;
    Pmf P = zipf(s, 256);
    auto sol = optimize_age(P);
    worst_gap = std::max(worst_gap, std::abs(sol.gap));
    o.check(sol.certified && std::abs(sol.gap) <= 1e-6, "s=" + fmt("%g", s) + " not certified");
    double a = age_real(sol.Pstar, P), b = age_real(P, P);
    o.check(a <= b + 1e-9, "s=" + fmt("%g", s) + " age(P*) > age(P)");
    if (s >= 3) o.check(a < b - 1e-6, "s=" + fmt("%g", s) + " no strict improvement");
    if (i % 2 == 0) row += fmt(" s=%g:", s) + fmt2("%.3f/%.3f", a, b);
  }
  o.note("zipf age(P*)/age(P)" + row + ", worst gap " + fmt("%.2g", worst_gap));

  const unsigned n = 16;
  const std::size_t N = std::size_t{1} << n;
  Pmf P(N + 1, 1.0 / (double(n) * double(N)));
  P[0] = 1.0 - 1.0 / n;
  Pmf Q(N + 1, (1.0 - std::pow(2.0, -std::sqrt(double(n)))) / double(N));
  Q[0] = std::pow(2.0, -std::sqrt(double(n)));
  double aP = age_real(P, P);
  double target = (n + 2 * std::log2(double(n))) / 2;
  double rel = std::abs(aP - target) / target;
  o.check(rel <= 0.15, "example age(Shannon-P) " + fmt("%.3f", aP) + " is " +
                           fmt("%.1f%%", 100 * rel) + " from " + fmt("%.0f", target));
  auto sol = optimize_age(P);
  double aStar = age_real(sol.Pstar, P), aQ = age_real(Q, P);
  o.check(aStar <= aQ + 0.5, "example age(P*) " + fmt("%.3f", aStar) + " vs Q " + fmt("%.3f", aQ));
  o.note("example: age(P) " + fmt("%.3f", aP) + ", age(Q) " + fmt("%.3f", aQ) + ", age(P*) " +
         fmt("%.3f", aStar));
  return o;
}

// ---- 14 --------------------------------------------------------------------

Outcome c14() {
  Outcome o;
  Pmf P(64, 1.0 / 244);
  std::vector<double> theta(64, 0.0);
  for (int i = 1; i <= 3; ++i) {
    P[i] = 0.25;
    theta[i] = 1.0;
  }
  double a = average_age_randomized(std::vector<double>(64, 2.0), theta, 2.0, P);
  double lb = 1.5 * entropy(P) - 0.5;
  o.check(std::abs(a - 3.17) <= 0.01, "randomized age " + fmt("%.4f", a));
  o.check(std::abs(lb - 4.724) <= 0.01, "lower bound " + fmt("%.4f", lb));
  o.check(a < lb, "not below the deterministic bound");
  o.note("randomized age " + fmt("%.4f", a) + " < (3/2)H - 1/2 = " + fmt("%.4f", lb));
  return o;
}

// ---- 15 --------------------------------------------------------------------

Outcome c15() {
  Outcome o;
  double worst_kl = 0, worst_diff = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    Pmf P = random_pmf(3 + 5 * s, 1500 + s);
    double L_th = 2 * entropy(P) + 2;
    auto sol = optimize_delay(P, L_th);
    o.check(sol.certified, "pmf " + std::to_string(s) + " not certified");
    double kl = kl_divergence(P, sol.Pstar);
    o.check(kl <= kKlBound + 1e-6, "pmf " + std::to_string(s) + fmt(" KL %.4f", kl));
    double closed = average_delay(shannon_lengths(sol.Pstar, LengthMode::Real), P, L_th);
    double diff = std::abs(closed - sol.value);
    o.check(diff <= 1e-6, "pmf " + std::to_string(s) + fmt(" value off by %.2g", diff));
    worst_kl = std::max(worst_kl, kl);
    worst_diff = std::max(worst_diff, diff);
  }
  o.note("max KL " + fmt("%.4f", worst_kl) + " (cap " + fmt("%.4f", kKlBound) +
         "), max |value - closed form| " + fmt("%.2g", worst_diff));
  return o;
}

// ---- 16 --------------------------------------------------------------------

Outcome c16() {
  Outcome o;
  Stream s(16);
  double worst_eq = 0, worst_excess = -INFINITY;
  const double ps[] = {1.5, 2.0, 3.0};
  for (int t = 0; t < 1000; ++t) {
    std::size_t n = 2 + t % 19;
    Pmf P = random_pmf(n, 160000 + t);
    std::vector<double> x(n);
    for (auto& v : x) v = s.uniform(0, 10);
    double p = ps[t % 3];
    double norm = lp_norm(x, P, p);
    double at = lp_norm_variational(x, P, p, variational_maximizer(x, P, p));
    worst_eq = std::max(worst_eq, std::abs(at - norm) / std::max(1.0, norm));
    Pmf Q = random_pmf(n, 260000 + t);
    worst_excess = std::max(worst_excess, lp_norm_variational(x, P, p, Q) - norm);
  }
  o.check(worst_eq <= 1e-9, "maximizer off by " + fmt("%.2g", worst_eq));
  o.check(worst_excess <= 1e-12, "random Q exceeds the norm by " + fmt("%.2g", worst_excess));
  o.note("max |tilted - norm| " + fmt("%.2g", worst_eq) + ", max excess of random Q " +
         fmt("%.2g", worst_excess));
  return o;
}

// ---- 17 --------------------------------------------------------------------

bool pairwise_prefix_free(const std::vector<BitString>& code) {
  for (std::size_t i = 0; i < code.size(); ++i)
    for (std::size_t j = 0; j < code.size(); ++j) {
      if (i == j || code[i].size() > code[j].size()) continue;
      if (code[j].sub(0, code[i].size()) == code[i]) return false;
    }
  return true;
}

Outcome c17() {
  Outcome o;
  std::vector<Pmf> sources;
  for (std::uint64_t s = 0; s < 60; ++s) sources.push_back(random_pmf(2 + s % 50, 1700 + s));
  for (int i = 0; i <= 10; ++i) sources.push_back(zipf(0.5 * i, 64));
  sources.push_back(Pmf{0.5, 0.25, 0.25});
  sources.push_back(Pmf{0.6, 0.4});
  // lengths produced from tilted pmfs as well
  std::size_t ntilt = sources.size();
  for (std::size_t i = 0; i < ntilt; i += 6) {
    sources.push_back(optimize_age(sources[i]).Pstar);
    sources.push_back(optimize_delay(sources[i], 2 * entropy(sources[i]) + 2).Pstar);
  }
  std::size_t bad = 0, total = 0;
  for (const Pmf& P : sources) {
    auto L = shannon_lengths(P, LengthMode::Integer);
    double kraft = 0;
    for (double l : L) kraft += std::ldexp(1.0, -static_cast<int>(l));
    auto code = build_prefix_code(as_uint(L));
    bool ok = kraft <= 1 + 1e-12 && pairwise_prefix_free(code);
    for (std::size_t i = 0; i < L.size(); ++i) ok = ok && code[i].size() == L[i];
    bad += !ok;
    ++total;
  }
  o.check(bad == 0, std::to_string(bad) + " unsound codebooks");
  o.note(std::to_string(total) + " length assignments checked");
  return o;
}

struct Criterion {
  int id;
  const char* desc;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "CUQ exact unbiasedness", c01},
      {2, "MQ recovery and clamp sweep", c02},
      {3, "RATQ second moment and bias, d=128", c03},
      {4, "RATQ bit budget, d=256", c04},
      {5, "SimQ enumeration and SimQ+ MSE/length", c05},
      {6, "Wyner-Ziv known Delta DME bound", c06},
      {7, "RDAQ Delta-adaptivity and boosting", c07},
      {8, "DME without side information", c08},
      {9, "Gaussian rate-distortion", c09},
      {10, "Gaussian Wyner-Ziv", c10},
      {11, "Quantized PSGD gaps", c11},
      {12, "Age closed form vs simulation", c12},
      {13, "Tilted-age optimizer", c13},
      {14, "Randomized update example", c14},
      {15, "Min-delay optimizer", c15},
      {16, "Variational Lp formula", c16},
      {17, "Prefix-code soundness", c17},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > 17) {
      std::fprintf(stderr, "usage: %s [criterion 1..17]\n", argv[0]);
      return 2;
    }
  }
  int failed = 0;
  for (const auto& c : criteria()) {
    if (only && c.id != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %02d %s [%.1fs] %s\n", o.pass ? "PASS" : "FAIL", c.id, c.desc, secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
