#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qtk/dme.hpp"
#include "qtk/stats.hpp"

using namespace qtk;

namespace {

Vec unit_dir(std::size_t d, std::uint64_t seed, double radius) {
  Stream s(seed);
  Vec v(d);
  for (auto& x : v) x = s.normal();
  double n = norm2(v);
  for (auto& x : v) x *= radius / n;
  return v;
}

DmeInstance no_side(std::size_t n, std::size_t d, std::size_t r, std::uint64_t seed) {
  DmeInstance I;
  I.n = n;
  I.d = d;
  I.r = r;
  for (std::size_t i = 0; i < n; ++i) I.x.push_back(unit_dir(d, seed + i, 1.0));
  return I;
}

DmeInstance with_side(std::size_t n, std::size_t d, std::size_t r, double Delta,
                      std::uint64_t seed) {
  DmeInstance I;
  I.n = n;
  I.d = d;
  I.r = r;
  Vec c = unit_dir(d, seed, 0.3);
  for (std::size_t i = 0; i < n; ++i) {
    Vec u = unit_dir(d, seed + 100 + i, Delta / 2);
    Vec x(d), y(d);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = c[j] + u[j];
      y[j] = c[j] - u[j];
    }
    I.x.push_back(x);
    I.y.push_back(y);
    I.Delta.push_back(std::sqrt(dist2_sq(x, y)));
  }
  return I;
}

// emits one more bit than it declares
class Overspender final : public VectorQuantizer {
 public:
  explicit Overspender(std::size_t d) : d_(d) {}
  std::string name() const override { return "overspender"; }
  std::size_t dim() const override { return d_; }
  std::optional<std::size_t> bit_budget() const override { return 1; }
  BitString encode(std::span<const double>, std::span<const double>,
                   const SeedPath&) const override {
    BitString b;
    b.write_uint(0, 2);
    return b;
  }
  Vec decode(const BitString&, std::span<const double>, const SeedPath&) const override {
    return Vec(d_, 0.0);
  }

 private:
  std::size_t d_;
};

}  // namespace

TEST(Dme, IdentityRecoveryWithDaq) {
  DmeInstance I;
  I.n = 5;
  I.d = 16;
  Vec x = unit_dir(16, 1, 0.6);
  I.x.assign(5, x);
  I.y.assign(5, x);
  auto q = make_daq(16);
  auto r = run_dme(I, [&](std::size_t) { return q; }, 3, 50);
  EXPECT_EQ(r.mse, 0.0);
  EXPECT_EQ(r.max_bits, 16u);
  EXPECT_EQ(r.trials, 50u);
}

TEST(Dme, SingleClientMatchesQuantizer) {
  auto I = no_side(1, 32, 0, 4);
  auto q = make_subsampled_ratq(32, 1.0, 40);
  const std::size_t T = 200;
  auto res = run_dme(I, [&](std::size_t) { return q; }, 9, T);
  RunningStats st;
  SeedPath root(9);
  for (std::size_t t = 0; t < T; ++t) {
    SeedPath p = root.child(Tag::Trial, t).child(Tag::Client, 0);
    st.add(dist2_sq(q->quantize(I.x[0], {}, p), I.x[0]));
  }
  EXPECT_NEAR(res.mse, st.mean(), 1e-12 * (1 + st.mean()));
}

TEST(Dme, DeterministicAcrossRuns) {
  auto I = no_side(6, 64, 30, 5);
  auto q = make_subsampled_ratq(64, 1.0, 30);
  auto a = run_dme(I, [&](std::size_t) { return q; }, 17, 300);
  auto b = run_dme(I, [&](std::size_t) { return q; }, 17, 300);
  EXPECT_EQ(a.mse, b.mse);
  EXPECT_EQ(a.estimate, b.estimate);
  auto c = run_dme(I, [&](std::size_t) { return q; }, 18, 300);
  EXPECT_NE(a.mse, c.mse);
}

TEST(Dme, NoSideBound) {
  const std::size_t n = 10, d = 256, r = 32;
  auto I = no_side(n, d, r, 7);
  auto q = make_subsampled_ratq(d, 1.0, r);
  auto res = run_dme(I, [&](std::size_t) { return q; }, 1, 1000);
  double bound = theoretical_bound(DmeSetting::NoSide, n, d, r, {});
  EXPECT_DOUBLE_EQ(bound, 8.0);
  EXPECT_LE(res.mse, bound + res.band);
  EXPECT_LE(res.max_bits, r);
}

TEST(Dme, DecompositionForUnbiased) {
  const std::size_t n = 8, d = 32;
  auto I = no_side(n, d, 0, 11);
  for (auto& x : I.x) x = I.x[0];
  auto q = make_subsampled_ratq(d, 1.0, 40);
  auto proto = run_dme(I, [&](std::size_t) { return q; }, 2, 4000);
  auto single = run_dme(no_side(1, d, 0, 11), [&](std::size_t) { return q; }, 3, 4000);
  EXPECT_NEAR(proto.mse, single.mse / n, proto.band + single.band / n);
}

TEST(Dme, SideInformationHelps) {
  const std::size_t n = 10, d = 64, r = 32;
  auto I = with_side(n, d, r, 0.1, 21);
  auto plan = configure_known_delta(n, d, r, I.Delta);
  auto qs = build(plan);
  auto known = run_dme(I, [&](std::size_t i) { return qs[i]; }, 4, 1000);

  DmeInstance J = I;
  J.y.clear();
  J.Delta.clear();
  auto q = make_subsampled_ratq(d, 1.0, r);
  auto plain = run_dme(J, [&](std::size_t) { return q; }, 4, 1000);
  EXPECT_LT(known.mse, plain.mse);
  EXPECT_LE(known.max_bits, r);
}

TEST(Dme, MonotoneInPrecision) {
  const std::size_t n = 5, d = 64;
  auto I = no_side(n, d, 0, 31);
  double prev = INFINITY, prev_band = 0;
  for (std::size_t r : {10u, 40u, 160u, 320u}) {
    auto q = make_subsampled_ratq(d, 1.0, r);
    auto res = run_dme(I, [&](std::size_t) { return q; }, 6, 1500);
    EXPECT_LE(res.mse, prev + res.band + prev_band) << r;
    prev = res.mse;
    prev_band = res.band;
  }
}

TEST(Dme, BudgetOverflowNamesClient) {
  auto I = no_side(3, 4, 1, 2);
  auto good = std::make_shared<SimqQuantizer>(4, 2.0);
  auto bad = std::make_shared<Overspender>(4);
  try {
    run_dme(I,
            [&](std::size_t i) -> std::shared_ptr<const VectorQuantizer> {
              if (i == 2) return bad;
              return good;
            },
            1, 5);
    FAIL() << "expected overflow";
  } catch (const BudgetOverflow& e) {
    EXPECT_EQ(e.client, 2u);
  }
}

TEST(Dme, RejectsBadInstances) {
  auto I = no_side(3, 4, 1, 2);
  auto q = std::make_shared<SimqQuantizer>(4, 2.0);
  EXPECT_THROW(run_dme(I, [&](std::size_t) { return q; }, 1, 0), ParamError);
  auto J = I;
  J.x.pop_back();
  EXPECT_THROW(run_dme(J, [&](std::size_t) { return q; }, 1, 5), ParamError);
  auto K = with_side(3, 8, 16, 0.2, 3);
  K.Delta[1] = 0.01;
  EXPECT_THROW(K.validate(), ContractViolation);
}

TEST(KnownDelta, Configure) {
  std::vector<double> D(100, 1.0);
  auto p = configure_known_delta(100, 64, 12, D);
  EXPECT_EQ(p.log_k, 4u);
  EXPECT_EQ(p.mu_d, 3u);
  EXPECT_FALSE(p.large_precision);
  EXPECT_NEAR(p.cfg[0].delta, 0.1, 1e-15);
  EXPECT_EQ(p.cfg[0].mq.k, 16u);

  auto two = configure_known_delta(2, 64, 64, {0.5, 0.2});
  EXPECT_EQ(two.cfg.size(), 2u);
  for (auto& c : two.cfg) {
    EXPECT_TRUE(std::isfinite(c.mq.delta_prime));
    EXPECT_GT(c.mq.delta_prime, 0.0);
  }

  EXPECT_THROW(configure_known_delta(100, 64, 7, D), ParamError);
  EXPECT_THROW(configure_known_delta(1, 64, 12, {1.0}), ParamError);
  EXPECT_THROW(configure_known_delta(100, 64, 100, D), ParamError);
  EXPECT_THROW(configure_known_delta(100, 64, 12, {1.0}), ParamError);
}

TEST(KnownDelta, LargePrecision) {
  std::vector<double> D(16, 1.0);
  auto p = configure_known_delta(16, 64, 64 * 5, D);
  EXPECT_TRUE(p.large_precision);
  EXPECT_EQ(p.log_k, 5u);
  EXPECT_EQ(p.mu_d, 64u);
  EXPECT_NEAR(p.cfg[0].delta, 1.0 / (4.0 * 30.0), 1e-15);
  auto qs = build(p);
  EXPECT_EQ(*qs[0]->bit_budget(), 320u);
  EXPECT_THROW(configure_known_delta(16, 60, 120, std::vector<double>(16, 1.0)), ParamError);
}

TEST(UnknownDelta, Configure) {
  auto p = configure_unknown_delta(64, 12);
  EXPECT_EQ(p.cfg.h, 4u);
  EXPECT_EQ(p.mu_d, 2u);
  EXPECT_FALSE(p.boosted);
  EXPECT_EQ(configure_unknown_delta(64, 50).mu_d, 8u);
  EXPECT_THROW(configure_unknown_delta(64, 11), ParamError);

  auto b = configure_unknown_delta(64, 64 * 6);
  EXPECT_TRUE(b.boosted);
  EXPECT_GE(b.cfg.N, 1u);
  EXPECT_EQ(b.mu_d, 64u);
  EXPECT_THROW(configure_unknown_delta(64, 64 * 5), ParamError);
}

TEST(Bound, Shapes) {
  EXPECT_EQ(theoretical_bound(DmeSetting::Known, 10, 64, 32, std::vector<double>(10, 0.0)), 0.0);
  double a = theoretical_bound(DmeSetting::Unknown, 10, 64, 32, std::vector<double>(10, 0.1));
  double b = theoretical_bound(DmeSetting::Unknown, 10, 64, 32, std::vector<double>(10, 0.01));
  EXPECT_NEAR(a / b, 10.0, 1e-9);
  double k = theoretical_bound(DmeSetting::KnownLarge, 10, 64, 256, std::vector<double>(10, 1.0));
  double expect = (12 * std::log(10.0) + 24 * 4 + 15.4 + 166) / (10 * 14.0 * 14.0);
  EXPECT_NEAR(k, expect, 1e-12);
  EXPECT_GT(theoretical_bound(DmeSetting::UnknownLarge, 10, 64, 256, std::vector<double>(10, 1.0)),
            0.0);
  EXPECT_THROW(theoretical_bound(DmeSetting::NoSide, 0, 64, 32, {}), ParamError);
}

TEST(Bound, SettingNames) {
  for (auto s : {DmeSetting::NoSide, DmeSetting::Known, DmeSetting::Unknown,
                 DmeSetting::KnownLarge, DmeSetting::UnknownLarge})
    EXPECT_EQ(parse_setting(to_string(s)), s);
  EXPECT_THROW(parse_setting("bogus"), ParamError);
}
