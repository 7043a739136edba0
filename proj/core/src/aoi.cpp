#include "qtk/aoi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qtk/errors.hpp"
#include "qtk/random.hpp"
#include "qtk/stats.hpp"

namespace qtk {

void validate_pmf(std::span<const double> P, double tol) {
  if (P.empty()) throw ParamError("pmf: empty");
  double s = 0;
  for (double p : P) {
    if (!std::isfinite(p) || p < 0) throw ParamError("pmf: entries must be finite and >= 0");
    s += p;
  }
  if (std::abs(s - 1.0) > tol)
    throw ParamError("pmf: probabilities sum to " + std::to_string(s) + ", not 1");
}

Pmf zipf(double s, std::size_t N) {
  if (N == 0) throw ParamError("zipf: N must be positive");
  Pmf P(N);
  for (std::size_t i = 0; i < N; ++i) P[i] = std::pow(double(i + 1), -s);
  double z = std::accumulate(P.begin(), P.end(), 0.0);
  for (double& p : P) p /= z;
  return P;
}

double entropy(std::span<const double> P) {
  double h = 0;
  for (double p : P)
    if (p > 0) h -= p * std::log2(p);
  return h;
}

double kl_divergence(std::span<const double> P, std::span<const double> Q) {
  double k = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i] <= 0) continue;
    if (Q[i] <= 0) return std::numeric_limits<double>::infinity();
    k += P[i] * std::log2(P[i] / Q[i]);
  }
  return k;
}

// ---- lengths and codes -----------------------------------------------------

std::vector<double> shannon_lengths(std::span<const double> P, LengthMode mode) {
  std::vector<double> l(P.size(), 0.0);
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i] <= 0) continue;
    double v = -std::log2(P[i]);
    if (mode == LengthMode::Integer) {
      // guard against -log2 of an exact power of two landing a hair above
      double r = std::round(v);
      v = std::abs(v - r) < 1e-12 ? r : std::ceil(v);
    }
    l[i] = v;
  }
  return l;
}

double kraft_sum(std::span<const double> lengths, std::span<const double> P) {
  double s = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i)
    if (P.empty() || P[i] > 0) s += std::exp2(-lengths[i]);
  return s;
}

std::vector<BitString> build_prefix_code(std::span<const unsigned> lengths) {
  if (lengths.empty()) throw ParamError("prefix code: no symbols");
  constexpr std::uint64_t one = std::uint64_t{1} << 63;
  std::uint64_t kraft = 0;
  for (unsigned l : lengths) {
    if (l < 1 || l > 63) throw ParamError("prefix code: lengths must lie in [1,63]");
    kraft += std::uint64_t{1} << (63 - l);
    if (kraft > one) throw ParamError("prefix code: Kraft sum exceeds 1");
  }
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
  std::vector<BitString> code(lengths.size());
  std::uint64_t c = 0;
  unsigned prev = lengths[order[0]];
  for (std::size_t k = 0; k < order.size(); ++k) {
    unsigned l = lengths[order[k]];
    if (k > 0) c = (c + 1) << (l - prev);
    prev = l;
    code[order[k]].write_uint(c, l);
  }
  return code;
}

bool is_prefix_free(std::span<const BitString> code) {
  for (std::size_t a = 0; a < code.size(); ++a)
    for (std::size_t b = 0; b < code.size(); ++b) {
      if (a == b || code[a].size() > code[b].size()) continue;
      if (code[b].sub(0, code[a].size()) == code[a]) return false;
    }
  return true;
}

LengthMoments length_moments(std::span<const double> lengths, std::span<const double> P) {
  if (lengths.size() != P.size()) throw ParamError("lengths and pmf differ in size");
  LengthMoments m;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i] <= 0) continue;
    m.m1 += P[i] * lengths[i];
    m.m2 += P[i] * lengths[i] * lengths[i];
  }
  return m;
}

// ---- closed forms ----------------------------------------------------------

double average_age(std::span<const double> lengths, std::span<const double> P) {
  auto m = length_moments(lengths, P);
  if (!(m.m1 > 0)) throw ParamError("average age: E[L] must be positive");
  return m.m1 + m.m2 / (2 * m.m1) - 0.5;
}

double average_age_randomized(std::span<const double> lengths, std::span<const double> theta,
                              double l_empty, std::span<const double> P) {
  if (lengths.size() != P.size() || theta.size() != P.size())
    throw ParamError("randomized age: size mismatch");
  double et = 0, m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (!(theta[i] >= 0 && theta[i] <= 1)) throw ParamError("randomized age: theta outside [0,1]");
    double w = P[i] * theta[i];
    et += w;
    m1 += w * lengths[i];
    m2 += w * lengths[i] * lengths[i];
  }
  if (!(et > 0)) throw ParamError("randomized age: E[theta(X)] must be positive");
  m1 += (1 - et) * l_empty;
  m2 += (1 - et) * l_empty * l_empty;
  if (!(m1 > 0)) throw ParamError("randomized age: E[L] must be positive");
  return m1 / et + m2 / (2 * m1) - 0.5;
}

double average_age_erasure(double base, double eps) {
  if (!(eps >= 0 && eps < 1)) throw ParamError("erasure age: eps must lie in [0,1)");
  return base / (1 - eps) + eps / (2 * (1 - eps));
}

double average_delay(std::span<const double> lengths, std::span<const double> P, double L_th) {
  auto m = length_moments(lengths, P);
  if (!(m.m1 < L_th)) throw ParamError("average delay: needs E[L] < L_th");
  return m.m1 + m.m2 / (2 * (L_th - m.m1));
}

// ---- simulator -------------------------------------------------------------

SimResult simulate_update_scheme(std::span<const BitString> code, std::span<const double> P,
                                 std::uint64_t T, std::uint64_t seed, const SimOptions& opt) {
  if (code.size() != P.size()) throw ParamError("simulator: code and pmf differ in size");
  validate_pmf(P, 1e-9);
  if (T < 1000) throw ParamError("simulator: horizon must be >= 1000 slots");
  if (!(opt.eps >= 0 && opt.eps < 1)) throw ParamError("simulator: eps must lie in [0,1)");
  const bool randomized = !opt.theta.empty();
  if (randomized && opt.theta.size() != P.size()) throw ParamError("simulator: theta size");
  if (randomized && !(opt.l_empty >= 1)) throw ParamError("simulator: empty codeword length");
  for (std::size_t i = 0; i < P.size(); ++i)
    if (P[i] > 0 && code[i].size() == 0) throw ParamError("simulator: empty codeword");

  std::vector<double> cdf(P.size());
  std::partial_sum(P.begin(), P.end(), cdf.begin());
  const SeedPath root(seed);
  Stream src = root.child(Tag::Input).stream();
  Stream chan = root.child(Tag::Uniform).stream();
  Stream coin = root.child(Tag::Restart).stream();
  const std::size_t last = P.size() - 1;

  auto slots_for = [&](std::uint64_t bits) {
    if (opt.eps == 0) return bits;
    std::uint64_t s = 0;
    for (std::uint64_t b = 0; b < bits; ++b) {
      ++s;
      while (chan.uniform() < opt.eps) ++s;
    }
    return s;
  };

  // Batch means over renewal cycles: a batch is the set of cycles that start in
  // its slot window, so each batch covers about T/batches slots.
  const std::size_t nb = std::max<std::size_t>(2, opt.batches);
  std::vector<double> b_age(nb, 0.0), b_len(nb, 0.0);

  SimResult r;
  std::uint64_t t = 0, U = 0;
  double total = 0;
  while (t < T) {
    double u = src.uniform();
    std::size_t x = std::min<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), last);
    while (P[x] <= 0 && x > 0) --x;
    bool send = !randomized || coin.uniform() < opt.theta[x];
    std::uint64_t bits = send ? code[x].size() : static_cast<std::uint64_t>(opt.l_empty);
    std::uint64_t L = slots_for(bits);
    std::uint64_t span = std::min(L, T - t);
    // slots t..t+span-1 see age (tau - U)
    double a = double(span) * double(t - U) + double(span) * double(span - 1) / 2.0;
    total += a;
    std::size_t b = std::min<std::size_t>(nb - 1, static_cast<std::size_t>(t * nb / T));
    b_age[b] += a;
    b_len[b] += double(span);
    ++r.cycles;
    if (send && t + L <= T) ++r.updates;
    if (send) U = t;
    t += L;
  }
  r.age = total / double(T);
  RunningStats st;
  for (std::size_t b = 0; b < nb; ++b)
    if (b_len[b] > 0) st.add(b_age[b] / b_len[b]);
  r.ci = st.stderr_mean();
  return r;
}

// ---- variational formula ---------------------------------------------------

double lp_norm(std::span<const double> x, std::span<const double> P, double p) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += P[i] * std::pow(std::abs(x[i]), p);
  return std::pow(s, 1.0 / p);
}

double lp_norm_variational(std::span<const double> x, std::span<const double> P, double p,
                           std::span<const double> Q) {
  if (!(p > 1)) throw ParamError("variational formula: p must exceed 1");
  if (x.size() != P.size() || Q.size() != P.size()) throw ParamError("variational: size mismatch");
  const double e = (p - 1) / p;  // 1/p'
  double v = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (Q[i] > 0 && P[i] <= 0) throw ParamError("variational formula: Q not dominated by P");
    if (P[i] <= 0 || Q[i] <= 0) continue;
    v += P[i] * std::pow(Q[i] / P[i], e) * std::abs(x[i]);
  }
  return v;
}

Pmf variational_maximizer(std::span<const double> x, std::span<const double> P, double p) {
  Pmf Q(P.size());
  double s = 0;
  for (std::size_t i = 0; i < P.size(); ++i) s += Q[i] = P[i] * std::pow(std::abs(x[i]), p);
  if (!(s > 0)) throw ParamError("variational formula: X is zero a.s.");
  for (double& q : Q) q /= s;
  return Q;
}

// ---- tilted codes ----------------------------------------------------------

std::optional<Pmf> tilted_pmf(double z, std::span<const double> Q, std::span<const double> P,
                              TiltKind kind) {
  if (Q.size() != P.size()) throw ParamError("tilted pmf: size mismatch");
  if (z < 0) throw ParamError("tilted pmf: z must be >= 0");
  const double c = kind == TiltKind::Age ? 1 - z * z / 2 : 1 + z * z / 2;
  Pmf g(P.size(), 0.0);
  double S = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i] <= 0) continue;
    g[i] = c * P[i] + z * std::sqrt(std::max(0.0, Q[i]) * P[i]);
    if (g[i] < 0) return std::nullopt;
    S += g[i];
  }
  if (!(S > 0)) return std::nullopt;
  for (double& v : g) v /= S;
  return g;
}

namespace {

// Symbols with equal probability share one coordinate (u = sqrt Q per symbol).
struct Classes {
  std::vector<double> P, n, sp;
  std::vector<std::size_t> of;  // symbol -> class, npos for P = 0
};

Classes group(std::span<const double> P) {
  Classes c;
  std::vector<std::pair<double, std::size_t>> v;
  for (std::size_t i = 0; i < P.size(); ++i)
    if (P[i] > 0) v.emplace_back(P[i], i);
  std::sort(v.begin(), v.end());
  c.of.assign(P.size(), static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k == 0 || v[k].first != v[k - 1].first) {
      c.P.push_back(v[k].first);
      c.n.push_back(0);
    }
    c.n.back() += 1;
    c.of[v[k].second] = c.P.size() - 1;
  }
  for (double p : c.P) c.sp.push_back(std::sqrt(p));
  return c;
}

class Problem {
 public:
  Problem(const Classes& c, TiltKind kind, double L_th) : c_(c), kind_(kind), L_th_(L_th) {}

  std::size_t size() const { return c_.P.size(); }

  double gfac(double z) const { return kind_ == TiltKind::Age ? 1 - z * z / 2 : 1 + z * z / 2; }

  // -inf outside G
  double value(double z, const std::vector<double>& u, std::vector<double>* g_out = nullptr,
               double* S_out = nullptr) const {
    const double f = gfac(z);
    std::vector<double> g(size());
    double S = 0;
    for (std::size_t k = 0; k < size(); ++k) {
      g[k] = f * c_.P[k] + z * c_.sp[k] * u[k];
      if (g[k] < 0) return -std::numeric_limits<double>::infinity();
      S += c_.n[k] * g[k];
    }
    double v = 0;
    for (std::size_t k = 0; k < size(); ++k)
      if (g[k] > 0) v += c_.n[k] * g[k] * std::log2(S / g[k]);
    if (kind_ == TiltKind::Delay) v -= z * z * L_th_ / 2;
    if (g_out) *g_out = std::move(g);
    if (S_out) *S_out = S;
    return v;
  }

  // cost of the real Shannon lengths of P* = g/S
  double cost(double z, const std::vector<double>& u) const {
    std::vector<double> g;
    double S = 0;
    value(z, u, &g, &S);
    double m1 = 0, m2 = 0;
    for (std::size_t k = 0; k < size(); ++k) {
      if (g[k] <= 0) return std::numeric_limits<double>::infinity();
      double l = std::log2(S / g[k]);
      m1 += c_.n[k] * c_.P[k] * l;
      m2 += c_.n[k] * c_.P[k] * l * l;
    }
    if (kind_ == TiltKind::Age) return m1 + m2 / (2 * m1);
    if (m1 >= L_th_) return std::numeric_limits<double>::infinity();
    return m1 + m2 / (2 * (L_th_ - m1));
  }

  double zmax(const std::vector<double>& u, double K) const {
    if (kind_ == TiltKind::Delay) return std::numeric_limits<double>::infinity();
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < size(); ++k) r = std::min(r, u[k] / c_.sp[k]);
    return std::min(K, r + std::sqrt(r * r + 2));
  }

  double best_z(const std::vector<double>& u, double K) const {
    auto f = [&](double z) { return value(z, u); };
    double hi = zmax(u, K);
    if (!std::isfinite(hi)) {
      hi = 1;
      while (hi < 1e8 && f(hi) >= f(hi / 2)) hi *= 2;
    }
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double a = 0, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, hi); ++it) {
      if (f1 > f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = f(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = f(x2);
      }
    }
    double z = (a + b) / 2;
    // endpoints can win for near-linear profiles
    double best = f(z);
    if (f(0.0) > best) z = 0.0;
    return z;
  }

  void normalize(std::vector<double>& u) const {
    double s = 0;
    for (std::size_t k = 0; k < size(); ++k) s += c_.n[k] * u[k] * u[k];
    s = std::sqrt(s);
    for (double& v : u) v /= s;
  }

  // move u toward the maximizer of the linearization sqrt(P) log(S/g)
  bool ascend(double z, std::vector<double>& u) const {
    std::vector<double> g;
    double S = 0;
    double v = value(z, u, &g, &S);
    std::vector<double> un(size());
    for (std::size_t k = 0; k < size(); ++k)
      un[k] = c_.sp[k] * (g[k] > 0 ? std::log2(S / g[k]) : 1100.0);
    normalize(un);
    for (double t = 1.0; t > 1e-12; t /= 2) {
      std::vector<double> uu(size());
      for (std::size_t k = 0; k < size(); ++k) uu[k] = (1 - t) * u[k] + t * un[k];
      normalize(uu);
      if (value(z, uu) >= v - 1e-15) {
        u = std::move(uu);
        return true;
      }
    }
    return false;
  }

 private:
  const Classes& c_;
  TiltKind kind_;
  double L_th_;
};

TiltSolution solve(std::span<const double> P, TiltKind kind, double L_th, const TiltOptions& opt) {
  validate_pmf(P, 1e-9);
  Classes cl = group(P);
  TiltSolution best;
  if (cl.P.size() == 1 && cl.n[0] == 1) {
    best.degenerate = true;
    best.certified = true;
    best.Q.assign(P.begin(), P.end());
    best.Pstar.assign(P.begin(), P.end());
    return best;
  }
  Problem prob(cl, kind, L_th);
  const double H = entropy(P);
  double support = 0;
  for (double n : cl.n) support += n;
  const double K = (std::log2(support) / std::max(H, 1e-12)) / std::sqrt(cl.P.front());

  const SeedPath root(opt.seed);
  bool have = false;
  for (std::size_t rs = 0; rs < std::max<std::size_t>(1, opt.restarts); ++rs) {
    std::vector<double> u(cl.P.size());
    Stream s = root.child(Tag::Restart, rs).stream();
    for (std::size_t k = 0; k < u.size(); ++k)
      u[k] = cl.sp[k] * (rs == 0 ? 1.0 : 0.25 + 1.5 * s.uniform());
    prob.normalize(u);
    double z = 0, gap = std::numeric_limits<double>::infinity(), val = 0;
    std::size_t it = 0;
    for (; it < opt.max_iter; ++it) {
      z = prob.best_z(u, K);
      val = prob.value(z, u);
      gap = prob.cost(z, u) - val;
      if (std::abs(gap) < 1e-10) break;
      if (!prob.ascend(z, u)) break;
    }
    z = prob.best_z(u, K);
    val = prob.value(z, u);
    gap = prob.cost(z, u) - val;
    bool cert = std::abs(gap) <= opt.tol;
    bool better = !have || (cert && !best.certified) ||
                  (cert == best.certified && val > best.value + 1e-12);
    if (better) {
      have = true;
      best.z = z;
      best.value = val;
      best.gap = gap;
      best.certified = cert;
      best.restart = rs;
      best.iterations = it;
      best.Q.assign(P.size(), 0.0);
      for (std::size_t i = 0; i < P.size(); ++i)
        if (cl.of[i] != static_cast<std::size_t>(-1)) best.Q[i] = u[cl.of[i]] * u[cl.of[i]];
    }
  }
  auto ps = tilted_pmf(best.z, best.Q, P, kind);
  if (!ps) throw Error("tilt optimizer: solution left the feasible set");
  best.Pstar = std::move(*ps);
  best.kl = kl_divergence(P, best.Pstar);
  return best;
}

}  // namespace

TiltSolution optimize_age(std::span<const double> P, const TiltOptions& opt) {
  return solve(P, TiltKind::Age, 0.0, opt);
}

TiltSolution optimize_delay(std::span<const double> P, double L_th, const TiltOptions& opt) {
  validate_pmf(P, 1e-9);
  double need = entropy(P) + kKlBound;
  if (!(L_th > need))
    throw ParamError("delay optimizer: needs L_th > H(P) + log2(1 + 1/sqrt 2) = " +
                     std::to_string(need));
  return solve(P, TiltKind::Delay, L_th, opt);
}

}  // namespace qtk
