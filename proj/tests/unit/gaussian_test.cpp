#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qtk/errors.hpp"
#include "qtk/gaussian.hpp"
#include "qtk/stats.hpp"

using namespace qtk;

namespace {

Vec gaussian(std::size_t d, Stream& s, double sd) {
  Vec v(d);
  for (auto& x : v) x = sd * s.normal();
  return v;
}

// truncated at |x| <= 3 so the source stays subgaussian (factor ~0.9 for b = 1/sqrt 2)
Vec laplace(std::size_t d, Stream& s, double b) {
  Vec v(d);
  for (auto& x : v) {
    do {
      double u = s.uniform() - 0.5;
      x = -b * (u < 0 ? -1.0 : 1.0) * std::log(1 - 2 * std::abs(u));
    } while (std::abs(x) > 3.0);
  }
  return v;
}

}  // namespace

TEST(GaussRd, Params) {
  auto p = GaussRdParams::make(4096, 1.0, 1.0 / 16);
  EXPECT_EQ(p.ladder.h, 4u);
  EXPECT_EQ(p.s, 2u);
  EXPECT_EQ(p.k, 31u);
  EXPECT_DOUBLE_EQ(p.rate(), 6.0);
  EXPECT_DOUBLE_EQ(p.rd_function(), 2.0);
  EXPECT_LE(p.rate(), p.rd_function() + 6);
  EXPECT_THROW(GaussRdParams::make(64, 1.0, 0.3), ParamError);
  EXPECT_THROW(GaussRdParams::make(0, 1.0, 0.1), ParamError);
}

TEST(GaussRd, MseAndBudget) {
  const std::size_t d = 1024;
  GaussRdQuantizer q(GaussRdParams::make(d, 1.0, 1.0 / 16));
  Stream src(3);
  RunningStats mse;
  SeedPath root(4);
  for (std::size_t t = 0; t < 100; ++t) {
    Vec x = gaussian(d, src, 1.0);
    std::size_t used = 0;
    Vec y = q.quantize(x, {}, root.child(Tag::Trial, t), &used);
    ASSERT_EQ(used, *q.bit_budget());
    mse.add(dist2_sq(x, y) / double(d));
  }
  EXPECT_LE(mse.mean(), 1.0 / 16);
}

TEST(GaussRd, LaplaceTails) {
  const std::size_t d = 1024;
  GaussRdQuantizer q(GaussRdParams::make(d, 1.0, 1.0 / 16));
  Stream src(5);
  RunningStats mse;
  SeedPath root(6);
  for (std::size_t t = 0; t < 100; ++t) {
    Vec x = laplace(d, src, 1.0 / std::sqrt(2.0));
    mse.add(dist2_sq(x, q.quantize(x, {}, root.child(Tag::Trial, t))) / double(d));
  }
  EXPECT_LE(mse.mean(), 1.0 / 16);
}

TEST(GaussRd, Unbiased) {
  const std::size_t d = 8;
  GaussRdQuantizer q(GaussRdParams::make(d, 1.0, 1.0 / 16));
  Vec x{0.3, -1.2, 2.5, 0.0, -0.7, 1.1, 4.0, -0.01};
  VectorStats st(d);
  SeedPath root(1);
  for (std::size_t t = 0; t < 40000; ++t) st.add(q.quantize(x, {}, root.child(Tag::Trial, t)));
  auto m = st.mean();
  auto se = st.stderr_mean();
  for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(m[i], x[i], 4.5 * se[i] + 1e-12) << i;
}

TEST(GaussWz, Params) {
  const double sz = 0.1, D = sz * sz / 400;
  auto p = GaussWzParams::make(4096, sz, D);
  EXPECT_EQ(p.log_k, 9u);
  EXPECT_NEAR(p.delta, std::sqrt(D / 308), 1e-15);
  EXPECT_NEAR(p.mq.delta_prime, std::sqrt(6 * sz * sz * std::log(sz / p.delta)), 1e-12);
  EXPECT_NEAR(p.mq.delta_prime, 0.593, 1e-3);
  EXPECT_LE(p.rate(), p.rd_function() + 8);
  EXPECT_EQ(p.bit_budget(), 4096u * 9);
  EXPECT_THROW(GaussWzParams::make(16, sz, sz * sz / 100), ParamError);
}

TEST(GaussWz, Mse) {
  const std::size_t d = 1024;
  const double sz = 0.1, D = sz * sz / 400;
  GaussWzQuantizer q(GaussWzParams::make(d, sz, D));
  Stream src(7);
  RunningStats mse;
  SeedPath root(8);
  for (std::size_t t = 0; t < 50; ++t) {
    Vec y = gaussian(d, src, 1.0);
    Vec z = gaussian(d, src, sz);
    Vec x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = y[i] + z[i];
    std::size_t used = 0;
    Vec xh = q.quantize(x, y, root.child(Tag::Trial, t), &used);
    ASSERT_EQ(used, d * 9);
    mse.add(dist2_sq(x, xh));
  }
  EXPECT_LE(mse.mean(), d * D);
}

TEST(GaussWz, NeedsSideInfo) {
  GaussWzQuantizer q(GaussWzParams::make(4, 0.1, 0.01 / 400));
  Vec x{0.1, 0.2, 0.3, 0.4};
  auto m = q.encode(x, x, SeedPath(1));
  EXPECT_THROW(q.decode(m, {}, SeedPath(1)), ParamError);
}
