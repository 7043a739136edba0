#include "qtk/dme.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qtk/adaptive.hpp"
#include "qtk/stats.hpp"

namespace qtk {

Vec DmeInstance::true_mean() const {
  Vec m(d, 0.0);
  for (const auto& xi : x)
    for (std::size_t j = 0; j < d; ++j) m[j] += xi[j];
  for (double& v : m) v /= static_cast<double>(n);
  return m;
}

void DmeInstance::validate() const {
  if (n == 0 || d == 0) throw ParamError("dme: n and d must be positive");
  if (x.size() != n) throw ParamError("dme: expected " + std::to_string(n) + " inputs");
  if (!y.empty() && y.size() != n) throw ParamError("dme: side information count mismatch");
  if (!Delta.empty() && Delta.size() != n) throw ParamError("dme: Delta count mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].size() != d || (!y.empty() && y[i].size() != d))
      throw ParamError("dme: client " + std::to_string(i) + " has wrong dimension");
    if (!Delta.empty()) {
      double dist = y.empty() ? norm2(x[i]) : std::sqrt(dist2_sq(x[i], y[i]));
      if (dist > Delta[i] * (1 + 1e-9) + 1e-12)
        throw ContractViolation("dme: client " + std::to_string(i) + " violates ||x-y|| <= Delta");
    }
  }
}

BudgetOverflow::BudgetOverflow(std::size_t c, std::size_t used, std::size_t budget)
    : Error("dme: client " + std::to_string(c) + " sent " + std::to_string(used) +
            " bits, budget " + std::to_string(budget)),
      client(c) {}

namespace {

struct TrialOut {
  double err = 0.0;
  std::size_t bits = 0;
};

TrialOut one_trial(const DmeInstance& inst,
                   const std::vector<std::shared_ptr<const VectorQuantizer>>& qs,
                   const SeedPath& root, std::size_t t, const Vec& mean, Vec* est_out) {
  Vec est(inst.d, 0.0);
  const Vec zeros;
  TrialOut o;
  SeedPath tp = root.child(Tag::Trial, t);
  for (std::size_t i = 0; i < inst.n; ++i) {
    SeedPath p = tp.child(Tag::Client, i);
    std::span<const double> side;
    if (inst.has_side()) side = inst.y[i];
    BitString msg = qs[i]->encode(inst.x[i], side, p);
    auto budget = qs[i]->bit_budget();
    if (budget && msg.size() > *budget) throw BudgetOverflow(i, msg.size(), *budget);
    o.bits = std::max(o.bits, msg.size());
    Vec xi = qs[i]->decode(msg, side, p);
    for (std::size_t j = 0; j < inst.d; ++j) est[j] += xi[j];
  }
  for (double& v : est) v /= static_cast<double>(inst.n);
  o.err = dist2_sq(est, mean);
  if (est_out) *est_out = std::move(est);
  return o;
}

}  // namespace

DmeResult run_dme(const DmeInstance& inst, const QuantizerFactory& factory, std::uint64_t seed,
                  std::size_t trials) {
  inst.validate();
  if (trials == 0) throw ParamError("dme: trials must be positive");
  std::vector<std::shared_ptr<const VectorQuantizer>> qs(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) {
    qs[i] = factory(i);
    if (!qs[i] || qs[i]->dim() != inst.d)
      throw ParamError("dme: factory returned a quantizer of wrong dimension for client " +
                       std::to_string(i));
  }
  const Vec mean = inst.true_mean();
  const SeedPath root(seed);

  std::vector<TrialOut> out(trials);
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, trials);
  std::vector<std::exception_ptr> errs(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t t = w; t + 1 < trials; t += workers)
          out[t] = one_trial(inst, qs, root, t, mean, nullptr);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  DmeResult r;
  out[trials - 1] = one_trial(inst, qs, root, trials - 1, mean, &r.estimate);
  RunningStats st;
  for (const auto& o : out) {
    st.add(o.err);
    r.max_bits = std::max(r.max_bits, o.bits);
  }
  r.mse = st.mean();
  r.band = 3.0 * st.stderr_mean();
  r.trials = trials;
  return r;
}

KnownDeltaPlan configure_known_delta(std::size_t n, std::size_t d, std::size_t r,
                                     const std::vector<double>& Delta) {
  if (n < 2) throw ParamError("known-delta: needs n >= 2");
  if (d == 0) throw ParamError("known-delta: d must be positive");
  if (Delta.size() != n)
    throw ParamError("known-delta: expected " + std::to_string(n) + " Delta values, got " +
                     std::to_string(Delta.size()));
  for (double D : Delta)
    if (!(D >= 0) || !std::isfinite(D)) throw ParamError("known-delta: Delta must be finite, >= 0");
  const std::size_t dp = next_pow2(d);
  KnownDeltaPlan plan;
  const double sn = std::sqrt(static_cast<double>(n));
  if (r > d && r % d == 0) {
    std::size_t m = r / d;
    if (m < 2) throw ParamError("known-delta: large precision needs r/d >= 2");
    if (m > 31) throw ParamError("known-delta: r/d too large");
    plan.large_precision = true;
    plan.log_k = static_cast<unsigned>(m);
    plan.mu_d = dp;
    const std::uint32_t k = 1u << m;
    for (double D : Delta)
      plan.cfg.push_back(RmqConfig::make(d, D, D / (sn * (std::pow(2.0, double(m)) - 2.0)), k));
    if (dp != d)
      throw ParamError("known-delta: large precision needs d to be a power of two");
    return plan;
  }
  if (r > d)
    throw ParamError("known-delta: r must satisfy r <= d or r = m d, got r=" + std::to_string(r));
  double lk = std::ceil(std::log2(2.0 + std::sqrt(12.0 * std::log(double(n)))));
  plan.log_k = static_cast<unsigned>(lk);
  if (r < 2 * plan.log_k)
    throw ParamError("known-delta: r=" + std::to_string(r) + " below 2 ceil(log(2+sqrt(12 ln n))) = " +
                     std::to_string(2 * plan.log_k));
  plan.mu_d = std::min(dp, r / plan.log_k);
  const std::uint32_t k = 1u << plan.log_k;
  for (double D : Delta) plan.cfg.push_back(RmqConfig::make(d, D, D / sn, k));
  return plan;
}

std::vector<std::shared_ptr<const VectorQuantizer>> build(const KnownDeltaPlan& plan) {
  std::vector<std::shared_ptr<const VectorQuantizer>> qs;
  for (const auto& c : plan.cfg) qs.push_back(make_wz_known(c, plan.mu_d));
  return qs;
}

UnknownDeltaPlan configure_unknown_delta(std::size_t d, std::size_t r) {
  if (d == 0) throw ParamError("unknown-delta: d must be positive");
  UnknownDeltaPlan plan;
  plan.cfg = RdaqConfig::make(d);
  const std::size_t dp = plan.cfg.d;
  const std::size_t per = plan.cfg.h + plan.cfg.index_bits();
  if (r > d && r % d == 0) {
    if (dp != d) throw ParamError("unknown-delta: boosted mode needs d to be a power of two");
    plan.boosted = true;
    plan.cfg.N = boosted_repetitions(plan.cfg, r / d);
    plan.mu_d = dp;
    return plan;
  }
  if (r < 2 * per)
    throw ParamError("unknown-delta: r=" + std::to_string(r) + " below 2(h + log h) = " +
                     std::to_string(2 * per));
  plan.mu_d = std::min(dp, r / per);
  return plan;
}

std::shared_ptr<const VectorQuantizer> build(const UnknownDeltaPlan& plan) {
  return make_wz_unknown(plan.cfg, plan.mu_d);
}

DmeSetting parse_setting(const std::string& s) {
  if (s == "no-side") return DmeSetting::NoSide;
  if (s == "known") return DmeSetting::Known;
  if (s == "unknown") return DmeSetting::Unknown;
  if (s == "known-large") return DmeSetting::KnownLarge;
  if (s == "unknown-large") return DmeSetting::UnknownLarge;
  throw ParamError("unknown dme setting '" + s + "'");
}

std::string to_string(DmeSetting s) {
  switch (s) {
    case DmeSetting::NoSide: return "no-side";
    case DmeSetting::Known: return "known";
    case DmeSetting::Unknown: return "unknown";
    case DmeSetting::KnownLarge: return "known-large";
    case DmeSetting::UnknownLarge: return "unknown-large";
  }
  return "?";
}

double theoretical_bound(DmeSetting s, std::size_t n, std::size_t d, std::size_t r,
                         const std::vector<double>& Delta) {
  if (n == 0 || d == 0 || r == 0) throw ParamError("bound: n, d, r must be positive");
  const double N = double(n), D = double(d), R = double(r);
  double m1 = 0, m2 = 0;
  for (double x : Delta) {
    m1 += x;
    m2 += x * x;
  }
  m1 /= N;
  m2 /= N;
  auto lstar = [](double b) { return b <= 1.0 ? 0.0 : double(log_star(b)); };
  switch (s) {
    case DmeSetting::NoSide:
      return (6.0 + 2.0 * std::ceil(std::log2(1.0 + lstar(D / 3.0)))) * D / (N * R);
    case DmeSetting::Known:
      return (79.0 * std::ceil(std::log2(2.0 + std::sqrt(12.0 * std::log(N)))) + 26.0) * m2 * D /
             (N * R);
    case DmeSetting::Unknown:
      return 128.0 * std::sqrt(3.0) * (1.0 + lstar(D / 6.0)) * m1 * D / (N * R);
    case DmeSetting::KnownLarge: {
      double g = std::pow(2.0, R / D) - 2.0;
      return (12.0 * std::log(N) + 24.0 * R / D + 154.0 / N + 166.0) * m2 / (N * g * g);
    }
    case DmeSetting::UnknownLarge:
      return m1 * 64.0 * std::sqrt(3.0) /
             (N * std::pow(2.0, R / (D * (2.0 + 2.0 * lstar(D / 6.0)))));
  }
  return 0.0;
}

}  // namespace qtk
