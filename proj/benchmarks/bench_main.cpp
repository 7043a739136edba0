#include <benchmark/benchmark.h>

#include <cmath>

#include "qtk/aoi.hpp"
#include "qtk/sideinfo.hpp"
#include "qtk/transform.hpp"
#include "qtk/vecquant.hpp"

using namespace qtk;

namespace {

Vec unit_vec(std::size_t d, std::uint64_t seed) {
  Stream s(seed);
  Vec v(d);
  for (auto& x : v) x = s.normal();
  double n = norm2(v);
  for (auto& x : v) x /= n;
  return v;
}

void BM_Fwht(benchmark::State& st) {
  Vec v = unit_vec(st.range(0), 1);
  for (auto _ : st) {
    fwht(v);
    benchmark::DoNotOptimize(v.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_Fwht)->RangeMultiplier(4)->Range(64, 1 << 16);

void BM_RatqRoundTrip(benchmark::State& st) {
  const std::size_t d = st.range(0);
  RatqQuantizer q(RatqConfig::defaults(d, 1.0));
  Vec y = unit_vec(d, 2);
  SeedPath root(3);
  std::uint64_t t = 0;
  for (auto _ : st) {
    SeedPath p = root.child(Tag::Trial, t++);
    benchmark::DoNotOptimize(q.decode(q.encode(y, {}, p), {}, p));
  }
  st.SetItemsProcessed(st.iterations() * d);
}
BENCHMARK(BM_RatqRoundTrip)->RangeMultiplier(4)->Range(64, 1 << 14);

void BM_RdaqRoundTrip(benchmark::State& st) {
  const std::size_t d = st.range(0);
  auto q = make_rdaq(RdaqConfig::make(d, static_cast<std::uint32_t>(st.range(1))));
  Vec x = unit_vec(d, 4);
  for (auto& v : x) v *= 0.9;
  Vec y = x;
  for (std::size_t i = 0; i < d; ++i) y[i] += 0.01 * (i % 2 ? 1 : -1) / std::sqrt(double(d));
  SeedPath root(5);
  std::uint64_t t = 0;
  for (auto _ : st) benchmark::DoNotOptimize(q->quantize(x, y, root.child(Tag::Trial, t++)));
  st.SetItemsProcessed(st.iterations() * d);
}
BENCHMARK(BM_RdaqRoundTrip)->Args({64, 1})->Args({1024, 1})->Args({1024, 4});

void BM_SimqPlusEncode(benchmark::State& st) {
  const std::size_t d = st.range(0);
  SimqPlusQuantizer q(d, 1.0, 2.0, d);
  Vec y = unit_vec(d, 6);
  SeedPath root(7);
  std::uint64_t t = 0;
  for (auto _ : st) benchmark::DoNotOptimize(q.encode(y, {}, root.child(Tag::Trial, t++)));
}
BENCHMARK(BM_SimqPlusEncode)->Arg(64)->Arg(256)->Arg(1024);

void BM_OptimizeAge(benchmark::State& st) {
  Pmf P = zipf(1.0, st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(optimize_age(P));
}
BENCHMARK(BM_OptimizeAge)->Arg(16)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_Simulator(benchmark::State& st) {
  Pmf P = zipf(1.0, 64);
  auto L = shannon_lengths(P, LengthMode::Integer);
  std::vector<unsigned> li;
  for (double l : L) li.push_back(static_cast<unsigned>(l));
  auto code = build_prefix_code(li);
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(simulate_update_scheme(code, P, 100000, seed++));
  st.SetItemsProcessed(st.iterations() * 100000);
}
BENCHMARK(BM_Simulator)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
