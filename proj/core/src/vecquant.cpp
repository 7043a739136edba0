#include "qtk/vecquant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_int.hpp>

#include "qtk/errors.hpp"

namespace qtk {

namespace {

constexpr double kNormSlack = 1e-9;

void check_l2(std::span<const double> x, double B, const char* who) {
  double nx = norm2(x);
  if (nx > B * (1 + kNormSlack) + 1e-300)
    throw ContractViolation(std::string(who) + ": ||x||_2 = " + std::to_string(nx) +
                            " exceeds B = " + std::to_string(B));
}

std::uint32_t log_h_for(double ratio) {
  // ceil(log(1 + ln*(ratio))), ln* of anything <= 1 is 0
  int ls = ratio <= 1.0 ? 0 : log_star(ratio);
  return ceil_log2(static_cast<std::uint64_t>(1 + ls));
}

TetraLadder ladder_for(double B, double d, std::uint32_t s, std::uint32_t log_h) {
  double m = 3.0 * B * B / d;
  double m0 = 2.0 * B * B / d * std::log(static_cast<double>(s));
  return TetraLadder(m, m0, 1u << log_h);
}

}  // namespace

// ---- RATQ ------------------------------------------------------------------

RatqConfig RatqConfig::defaults(std::size_t n, double B) {
  if (n == 0) throw ParamError("ratq: dimension must be positive");
  if (!(B > 0)) throw ParamError("ratq: B must be positive");
  RatqConfig c;
  c.B = B;
  c.n = n;
  c.d = next_pow2(n);
  std::uint32_t lh = log_h_for(c.d / 3.0);
  c.s = std::max<std::uint32_t>(1, lh);
  c.ladder = ladder_for(B, static_cast<double>(c.d), c.s, lh);
  double kk = std::ceil(std::log2(2.0 + std::sqrt(9.0 + 3.0 * std::log(double(c.s)))));
  c.k = (1u << static_cast<unsigned>(kk)) - 1;
  return c;
}

std::size_t RatqConfig::bit_budget() const {
  return subvectors() * ladder.index_bits() + d * ceil_log2(std::uint64_t{k} + 1);
}

double RatqConfig::alpha_bound() const {
  double km1 = k - 1.0;
  return B * std::sqrt((9.0 + 3.0 * std::log(double(s))) / (km1 * km1) + 1.0);
}

RatqQuantizer::RatqQuantizer(RatqConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.d != next_pow2(cfg_.n)) throw ParamError("ratq: d must be the padded dimension");
  if (cfg_.s < 1) throw ParamError("ratq: s must be >= 1");
  if (cfg_.k < 2) throw ParamError("ratq: k must be >= 2");
}

BitString RatqQuantizer::encode(std::span<const double> x, std::span<const double>,
                                const SeedPath& path) const {
  if (x.size() != cfg_.n) throw ParamError("ratq: dimension mismatch");
  check_l2(x, cfg_.B, "ratq");
  Padded p = pad_to_pow2(x);
  Stream rs = path.child(Tag::Rotation).stream();
  Vec xr = rotate(p.data, sample_signs(rs, cfg_.d));
  Stream priv = path.child(Tag::Private).stream();

  const std::size_t nb = cfg_.subvectors();
  std::vector<std::uint32_t> js(nb);
  std::vector<std::uint32_t> syms;
  syms.reserve(cfg_.d);
  for (std::size_t b = 0; b < nb; ++b) {
    std::size_t lo = b * cfg_.s, hi = std::min(cfg_.d, lo + cfg_.s);
    AtuqResult r = atuq_quantize(std::span(xr).subspan(lo, hi - lo), cfg_.ladder, cfg_.k, priv);
    js[b] = r.j;
    syms.insert(syms.end(), r.symbols.begin(), r.symbols.end());
  }
  BitString out;
  const unsigned jb = cfg_.ladder.index_bits(), sb = ceil_log2(std::uint64_t{cfg_.k} + 1);
  for (auto j : js) out.write_field(j, jb);
  for (auto sy : syms) out.write_uint(sy, sb);
  return out;
}

Vec RatqQuantizer::decode(const BitString& msg, std::span<const double>,
                          const SeedPath& path) const {
  BitReader in(msg);
  const std::size_t nb = cfg_.subvectors();
  const unsigned jb = cfg_.ladder.index_bits(), sb = ceil_log2(std::uint64_t{cfg_.k} + 1);
  std::vector<std::uint32_t> js(nb);
  for (auto& j : js) j = static_cast<std::uint32_t>(in.read_field(jb));
  Vec yr(cfg_.d);
  for (std::size_t b = 0; b < nb; ++b) {
    if (js[b] >= cfg_.ladder.h) throw MalformedStream("ratq: range index out of range");
    UniformGrid g = atuq_grid(cfg_.ladder, js[b], cfg_.k);
    std::size_t lo = b * cfg_.s, hi = std::min(cfg_.d, lo + cfg_.s);
    for (std::size_t i = lo; i < hi; ++i)
      yr[i] = cuq_decode_one(static_cast<std::uint32_t>(in.read_uint(sb)), g);
  }
  Stream rs = path.child(Tag::Rotation).stream();
  Vec out = unrotate(yr, sample_signs(rs, cfg_.d));
  out.resize(cfg_.n);
  return out;
}

std::size_t AtuqCoordCodec::bits_for(std::size_t count) const {
  return count * (ladder_.index_bits() + ceil_log2(std::uint64_t{k_} + 1));
}

void AtuqCoordCodec::encode(std::span<const double> xr, std::span<const std::size_t>,
                            const SeedPath& path, BitString& out) const {
  Stream priv = path.child(Tag::Private).stream();
  std::vector<AtuqResult> rs;
  rs.reserve(xr.size());
  for (double v : xr) rs.push_back(atuq_quantize(std::span(&v, 1), ladder_, k_, priv));
  for (auto& r : rs) out.write_field(r.j, ladder_.index_bits());
  const unsigned sb = ceil_log2(std::uint64_t{k_} + 1);
  for (auto& r : rs) out.write_uint(r.symbols[0], sb);
}

Vec AtuqCoordCodec::decode(BitReader& in, std::span<const double> yr,
                           std::span<const std::size_t>, const SeedPath&) const {
  std::vector<std::uint32_t> js(yr.size());
  for (auto& j : js) j = static_cast<std::uint32_t>(in.read_field(ladder_.index_bits()));
  const unsigned sb = ceil_log2(std::uint64_t{k_} + 1);
  Vec out(yr.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    if (js[t] >= ladder_.h) throw MalformedStream("atuq-coord: range index out of range");
    out[t] = cuq_decode_one(static_cast<std::uint32_t>(in.read_uint(sb)),
                            atuq_grid(ladder_, js[t], k_));
  }
  return out;
}

SubsampledRatqParams subsampled_ratq_params(std::size_t n, double B, std::size_t r) {
  SubsampledRatqParams p;
  RatqConfig& c = p.ratq;
  c.B = B;
  c.n = n;
  c.d = next_pow2(n);
  c.s = 1;
  std::uint32_t lh = log_h_for(c.d / 3.0);
  c.ladder = ladder_for(B, static_cast<double>(c.d), 1, lh);
  c.k = 7;
  p.mu_d = std::min<std::size_t>(c.d, r / (3 + lh));
  if (p.mu_d < 1)
    throw ParamError("subsampled ratq: r=" + std::to_string(r) + " is below 3 + ceil(log h) = " +
                     std::to_string(3 + lh) + " bits");
  return p;
}

std::shared_ptr<RcsQuantizer> make_subsampled_ratq(const SubsampledRatqParams& p) {
  auto codec = std::make_shared<AtuqCoordCodec>(p.ratq.ladder, p.ratq.k);
  auto q = std::make_shared<RcsQuantizer>(p.ratq.n, codec, p.mu_d, FillMode::ZeroFill, true,
                                          "subsampled-ratq");
  q->set_alpha_bound(p.ratq.alpha_bound() / std::sqrt(q->mu()));
  return q;
}

std::shared_ptr<RcsQuantizer> make_subsampled_ratq(std::size_t n, double B, std::size_t r) {
  return make_subsampled_ratq(subsampled_ratq_params(n, B, r));
}

// ---- A-RATQ ----------------------------------------------------------------

double AguqGain::second_moment_factor() const {
  double km1 = k - 1.0;
  return 1.0 / (4 * km1 * km1) + ladder.a * (ladder.h - 1.0) / (4 * km1 * km1) + 1.0;
}

double AguqGain::bias_bound() const {
  return ladder.B * ladder.B / ladder.range(ladder.h - 1);
}

AguqGain aguq_high_precision(double B, std::uint64_t T) {
  if (T < 2) throw ParamError("aguq: horizon T must be >= 2");
  double lt = std::log2(static_cast<double>(T));
  auto lh = static_cast<unsigned>(std::ceil(std::log2(1.0 + 0.5 * lt)));
  auto lk = static_cast<unsigned>(std::ceil(std::log2(2.0 + 0.5 * std::sqrt(lt + 1.0))));
  AguqGain g;
  g.ladder = GeoLadder(B, 2.0, 1u << lh);
  g.k = (1u << lk) - 1;
  return g;
}

ARatqQuantizer::ARatqQuantizer(std::size_t n, double B, std::variant<AguqGain, AguqPlus> gain,
                               std::shared_ptr<const VectorQuantizer> shape)
    : n_(n), B_(B), gain_(std::move(gain)), shape_(std::move(shape)) {
  if (!shape_ || shape_->dim() != n_) throw ParamError("a-ratq: shape quantizer dimension mismatch");
}

std::string ARatqQuantizer::name() const {
  return std::holds_alternative<AguqGain>(gain_) ? "a-ratq" : "a-ratq+";
}

std::optional<std::size_t> ARatqQuantizer::bit_budget() const {
  auto sb = shape_->bit_budget();
  if (!sb) return std::nullopt;
  if (auto* g = std::get_if<AguqGain>(&gain_)) return aguq_bits(g->ladder, g->k) + *sb;
  return std::nullopt;
}

std::optional<double> ARatqQuantizer::alpha_bound() const {
  auto sa = shape_->alpha_bound();
  auto* g = std::get_if<AguqGain>(&gain_);
  if (!sa || !g) return std::nullopt;
  return B_ * std::sqrt(g->second_moment_factor()) * *sa;
}

std::optional<double> ARatqQuantizer::bias_bound() const {
  if (auto* g = std::get_if<AguqGain>(&gain_)) return g->bias_bound();
  const auto& p = std::get<AguqPlus>(gain_);
  return p.ladder.B * p.ladder.B / p.ladder.range(p.h() - 1);
}

BitString ARatqQuantizer::encode(std::span<const double> x, std::span<const double>,
                                 const SeedPath& path) const {
  if (x.size() != n_) throw ParamError("a-ratq: dimension mismatch");
  double g = norm2(x);
  Vec shape(n_, 0.0);
  if (g > 0) {
    for (std::size_t i = 0; i < n_; ++i) shape[i] = x[i] / g;
  } else {
    shape[0] = 1.0;  // e_1 convention for the zero vector
  }
  Stream gs = path.child(Tag::Gain).stream();
  BitString out;
  if (auto* ag = std::get_if<AguqGain>(&gain_)) {
    aguq_write(out, aguq_quantize(g, ag->ladder, ag->k, gs), ag->ladder, ag->k);
  } else {
    out = aguq_plus_quantize(g, std::get<AguqPlus>(gain_), gs).bits;
  }
  out.append(shape_->encode(shape, {}, path.child(Tag::Shape)));
  return out;
}

Vec ARatqQuantizer::decode(const BitString& msg, std::span<const double>,
                           const SeedPath& path) const {
  BitReader in(msg);
  double g;
  if (auto* ag = std::get_if<AguqGain>(&gain_)) {
    g = aguq_read(in, ag->ladder, ag->k).reconstruction;
  } else {
    g = aguq_plus_read(in, std::get<AguqPlus>(gain_));
  }
  BitString rest = msg.sub(in.position(), in.remaining());
  Vec s = shape_->decode(rest, {}, path.child(Tag::Shape));
  for (auto& v : s) v *= g;
  return s;
}

std::shared_ptr<ARatqQuantizer> make_aratq(std::size_t n, double B, std::uint64_t T,
                                           GainMode mode) {
  auto shape = std::make_shared<RatqQuantizer>(RatqConfig::defaults(n, 1.0));
  if (mode == GainMode::Aguq)
    return std::make_shared<ARatqQuantizer>(n, B, aguq_high_precision(B, T), shape);
  return std::make_shared<ARatqQuantizer>(n, B, AguqPlus(B, T), shape);
}

// ---- SimQ ------------------------------------------------------------------

SimqDraw simq_draw(std::span<const double> y, double B, Stream& s) {
  double u = s.uniform() * B;
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    acc += std::abs(y[i]);
    if (u < acc) {
      auto idx = static_cast<std::int64_t>(i + 1);
      return {y[i] < 0 ? -idx : idx};
    }
  }
  return {0};
}

BitString SimqQuantizer::encode(std::span<const double> x, std::span<const double>,
                                const SeedPath& path) const {
  if (x.size() != d_) throw ParamError("simq: dimension mismatch");
  double l1 = norm_p(x, 1.0);
  if (l1 > B_ * (1 + kNormSlack))
    throw ContractViolation("simq: ||x||_1 = " + std::to_string(l1) + " exceeds B");
  Stream s = path.child(Tag::Private).stream();
  SimqDraw dr = simq_draw(x, B_, s);
  BitString out;
  out.write_uint(static_cast<std::uint64_t>(dr.index + static_cast<std::int64_t>(d_)),
                 ceil_log2(2 * d_ + 1));
  return out;
}

Vec SimqQuantizer::decode(const BitString& msg, std::span<const double>, const SeedPath&) const {
  BitReader in(msg);
  auto v = static_cast<std::int64_t>(in.read_uint(ceil_log2(2 * d_ + 1))) -
           static_cast<std::int64_t>(d_);
  if (v < -static_cast<std::int64_t>(d_) || v > static_cast<std::int64_t>(d_))
    throw MalformedStream("simq: index out of range");
  Vec out(d_, 0.0);
  if (v != 0) out[static_cast<std::size_t>(std::abs(v)) - 1] = v > 0 ? B_ : -B_;
  return out;
}

// ---- SimQ+ -----------------------------------------------------------------

using boost::multiprecision::cpp_int;

// N[m][R] = number of compositions of R into m nonnegative parts.
struct SimqPlusQuantizer::Binomials {
  std::size_t k;
  std::vector<std::vector<cpp_int>> N;
  Binomials(std::size_t parts, std::size_t k_) : k(k_), N(parts + 2) {
    N[1].assign(k + 1, 1);
    for (std::size_t m = 2; m <= parts + 1; ++m) {
      N[m].assign(k + 1, 0);
      N[m][0] = 1;
      for (std::size_t R = 1; R <= k; ++R) N[m][R] = N[m - 1][R] + N[m][R - 1];
    }
  }
  const cpp_int& at(std::size_t m, std::size_t R) const { return N[m][R]; }
};

SimqPlusQuantizer::SimqPlusQuantizer(std::size_t d, double B, double p, std::size_t k)
    : d_(d), B_(B), p_(p) {
  if (d == 0) throw ParamError("simq+: dimension must be positive");
  if (!(p >= 2.0)) throw ParamError("simq+: p must be in [2, inf]");
  double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  k_ = k ? k : static_cast<std::size_t>(std::ceil(std::pow(double(d), 2.0 * inv_p) - 1e-9));
  if (k_ < 1) k_ = 1;
  scale_ = B * std::pow(double(d), inv_p);
  binom_ = std::make_unique<Binomials>(d_, k_);
  // d+1 parts summing to k: C(d+k, k) types
  cpp_int total = binom_->at(d_ + 1, k_);
  type_bits_ = total <= 1 ? 0 : static_cast<unsigned>(boost::multiprecision::msb(cpp_int(total - 1)) + 1);
}

SimqPlusQuantizer::~SimqPlusQuantizer() = default;

std::optional<std::size_t> SimqPlusQuantizer::bit_budget() const {
  return type_bits_ + std::min(d_, k_);
}

std::optional<double> SimqPlusQuantizer::alpha_bound() const {
  // ||y||_2 <= ||y||_q for q <= 2
  return std::sqrt(mse_bound() + B_ * B_);
}

double SimqPlusQuantizer::budget_formula() const {
  double k = double(k_);
  return k * std::log2(std::numbers::e) + k * std::log2(double(d_) / k + 1.0) + k;
}

double SimqPlusQuantizer::mse_bound() const {
  double inv_p = std::isinf(p_) ? 0.0 : 1.0 / p_;
  return std::pow(double(d_), 2.0 * inv_p) * B_ * B_ / double(k_);
}

BitString SimqPlusQuantizer::rank(std::span<const std::uint32_t> counts) const {
  if (counts.size() != d_ + 1) throw ParamError("simq+: composition must have d+1 parts");
  cpp_int r = 0;
  std::size_t R = k_;
  for (std::size_t i = 0; i < d_; ++i) {
    std::size_t m = d_ - i;
    std::size_t c = counts[i];
    if (c > R) throw ParamError("simq+: composition exceeds k");
    // sum_{v<c} N(R-v, m) = N(R, m+1) - N(R-c, m+1)
    if (c > 0) r += binom_->at(m + 1, R) - binom_->at(m + 1, R - c);
    R -= c;
  }
  if (counts[d_] != R) throw ParamError("simq+: composition does not sum to k");
  BitString out;
  for (unsigned b = type_bits_; b-- > 0;) out.push_bit(boost::multiprecision::bit_test(r, b));
  return out;
}

std::vector<std::uint32_t> SimqPlusQuantizer::unrank(const BitString& bits) const {
  cpp_int r = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    r <<= 1;
    if (bits.bit(i)) r += 1;
  }
  if (r >= binom_->at(d_ + 1, k_)) throw MalformedStream("simq+: type rank out of range");
  std::vector<std::uint32_t> counts(d_ + 1, 0);
  std::size_t R = k_;
  for (std::size_t i = 0; i < d_; ++i) {
    std::size_t m = d_ - i;
    std::size_t v = 0;
    while (r >= binom_->at(m, R - v)) {
      r -= binom_->at(m, R - v);
      ++v;
    }
    counts[i] = static_cast<std::uint32_t>(v);
    R -= v;
  }
  counts[d_] = static_cast<std::uint32_t>(R);
  return counts;
}

BitString SimqPlusQuantizer::encode(std::span<const double> x, std::span<const double>,
                                    const SeedPath& path) const {
  if (x.size() != d_) throw ParamError("simq+: dimension mismatch");
  double q = std::isinf(p_) ? 1.0 : p_ / (p_ - 1.0);
  double nq = norm_p(x, q);
  if (nq > B_ * (1 + kNormSlack))
    throw ContractViolation("simq+: ||x||_q = " + std::to_string(nq) + " exceeds B");
  Stream s = path.child(Tag::Private).stream();
  std::vector<std::uint32_t> counts(d_ + 1, 0);  // slot 0: zero draw, slot i: coordinate i
  for (std::size_t t = 0; t < k_; ++t) {
    SimqDraw dr = simq_draw(x, scale_, s);
    ++counts[static_cast<std::size_t>(std::abs(dr.index))];
  }
  BitString out = rank(counts);
  for (std::size_t i = 1; i <= d_; ++i)
    if (counts[i]) out.push_bit(x[i - 1] < 0);
  return out;
}

Vec SimqPlusQuantizer::decode(const BitString& msg, std::span<const double>,
                              const SeedPath&) const {
  if (msg.size() < type_bits_) throw TruncatedStream("simq+: message shorter than type field");
  auto counts = unrank(msg.sub(0, type_bits_));
  BitReader in(msg, type_bits_);
  Vec out(d_, 0.0);
  for (std::size_t i = 1; i <= d_; ++i) {
    if (!counts[i]) continue;
    double sign = in.read_bit() ? -1.0 : 1.0;
    out[i - 1] = sign * scale_ * counts[i] / double(k_);
  }
  return out;
}

// ---- l_p split -------------------------------------------------------------

LpSplitParams LpSplitParams::make(std::size_t d, double B, double p) {
  if (d == 0) throw ParamError("lp-split: dimension must be positive");
  if (!(p >= 1.0 && p <= 2.0)) throw ParamError("lp-split: p must be in [1,2]");
  LpSplitParams P;
  P.B = B;
  P.p = p;
  P.d = d;
  const bool q_inf = (p == 1.0);
  P.q = q_inf ? INFINITY : p / (p - 1.0);
  const double inv_q = q_inf ? 0.0 : 1.0 / P.q;
  const double dd = double(d);
  P.delta2 = log_h_for(dd / 3.0);
  double l2 = std::log(double(std::max<std::uint32_t>(1, P.delta2)));
  P.delta1 = static_cast<std::uint32_t>(
      std::ceil(std::log2(2.0 + std::sqrt(18.0 + 6.0 * l2) * std::pow(dd, 0.5 - inv_q))));
  P.c = B * std::pow(double(P.delta1), inv_q) / std::pow(dd, inv_q);
  auto lk = static_cast<unsigned>(
      std::ceil(std::log2(2.0 * std::sqrt(2.0) * std::pow(double(P.delta1), inv_q) + 2.0)));
  P.small = UniformGrid(P.c, (1u << lk) - 1, GridMode::Signed);

  P.d_large = std::max<std::size_t>(1, d / P.delta1);
  RatqConfig& r = P.large;
  r.B = B * std::pow(dd, 0.5 - inv_q);
  r.n = P.d_large;
  r.d = next_pow2(P.d_large);
  std::uint32_t lh = log_h_for(double(P.d_large) / 3.0);
  r.s = std::max<std::uint32_t>(1, lh);
  r.ladder = ladder_for(r.B, double(P.d_large), r.s, lh);
  if (P.delta1 > 31) throw ParamError("lp-split: Delta1 too large");
  r.k = (1u << P.delta1) - 1;
  return P;
}

LpSplitQuantizer::LpSplitQuantizer(std::size_t d, double B, double p)
    : P_(LpSplitParams::make(d, B, p)), large_(P_.large) {}

std::optional<std::size_t> LpSplitQuantizer::bit_budget() const {
  return P_.d + P_.d * P_.small.symbol_bits() + P_.large.bit_budget();
}

std::optional<double> LpSplitQuantizer::alpha_bound() const { return std::sqrt(12.0) * P_.B; }

BitString LpSplitQuantizer::encode(std::span<const double> x, std::span<const double>,
                                   const SeedPath& path) const {
  if (x.size() != P_.d) throw ParamError("lp-split: dimension mismatch");
  double nq = norm_p(x, P_.q);
  if (nq > P_.B * (1 + kNormSlack))
    throw ContractViolation("lp-split: ||x||_q = " + std::to_string(nq) + " exceeds B");
  BitString out;
  Vec y1(P_.d, 0.0), y2;
  for (std::size_t i = 0; i < P_.d; ++i) {
    bool big = std::abs(x[i]) > P_.c;
    out.push_bit(big);
    if (big) y2.push_back(x[i]);
    else y1[i] = x[i];
  }
  if (y2.size() > P_.d_large) throw ContractViolation("lp-split: too many large coordinates");
  Stream s = path.child(Tag::Part, 1).stream();
  const unsigned sb = P_.small.symbol_bits();
  for (double v : y1) out.write_uint(cuq_encode_one(v, P_.small, s), sb);
  y2.resize(P_.d_large, 0.0);
  out.append(large_.encode(y2, {}, path.child(Tag::Part, 2)));
  return out;
}

Vec LpSplitQuantizer::decode(const BitString& msg, std::span<const double>,
                             const SeedPath& path) const {
  BitReader in(msg);
  std::vector<std::size_t> big;
  for (std::size_t i = 0; i < P_.d; ++i)
    if (in.read_bit()) big.push_back(i);
  if (big.size() > P_.d_large) throw MalformedStream("lp-split: mask has too many entries");
  const unsigned sb = P_.small.symbol_bits();
  Vec out(P_.d);
  for (auto& v : out) v = cuq_decode_one(static_cast<std::uint32_t>(in.read_uint(sb)), P_.small);
  Vec y2 = large_.decode(msg.sub(in.position(), in.remaining()), {}, path.child(Tag::Part, 2));
  for (std::size_t t = 0; t < big.size(); ++t) out[big[t]] += y2[t];
  return out;
}

}  // namespace qtk
