// quantize-bench, dme-bench, opt-bench, rd-bench
#include <cmath>
#include <memory>

#include "common.hpp"
#include "qtk/dme.hpp"
#include "qtk/errors.hpp"
#include "qtk/gaussian.hpp"
#include "qtk/optharness.hpp"
#include "qtk/stats.hpp"
#include "qtk/vecquant.hpp"

namespace qtk::cli {

namespace {

// direction drawn from the path, scaled to ||.||_p = radius
Vec random_point(std::size_t d, double p, double radius, Stream s) {
  Vec v(d);
  for (auto& x : v) x = s.normal();
  double n = norm_p(v, p);
  for (auto& x : v) x *= radius / n;
  return v;
}

// ---- quantize-bench --------------------------------------------------------

struct QuantizeBench {
  std::vector<std::string> quantizers{"ratq", "subsampled-ratq", "simq", "simq+", "lp-split"};
  std::vector<std::size_t> dims{64, 256};
  double B = 1.0;
  std::size_t r = 0;        // subsampled RATQ precision, 0: d
  double simq_p = 2.0;      // SimQ+ norm
  std::size_t simq_k = 0;   // SimQ+ repetitions, 0: default
  double split_p = 1.0;     // l_p split quantizer
  std::uint64_t horizon = 1024;  // A-RATQ T

  struct Made {
    std::shared_ptr<const VectorQuantizer> q;
    double input_p;  // norm of the input ball
    double moment_p; // norm the second moment is measured in
  };

  Made make(const std::string& name, std::size_t d) const {
    if (name == "ratq") return {std::make_shared<RatqQuantizer>(RatqConfig::defaults(d, B)), 2, 2};
    if (name == "subsampled-ratq") return {make_subsampled_ratq(d, B, r ? r : d), 2, 2};
    if (name == "aratq") return {make_aratq(d, B, horizon, GainMode::Aguq), 2, 2};
    if (name == "aratq+") return {make_aratq(d, B, horizon, GainMode::AguqPlus), 2, 2};
    if (name == "simq") return {std::make_shared<SimqQuantizer>(d, B), 1, 2};
    if (name == "simq+")
      return {std::make_shared<SimqPlusQuantizer>(d, B, simq_p, simq_k), simq_p, 2};
    if (name == "lp-split") {
      double q = split_p == 1.0 ? INFINITY : split_p / (split_p - 1);
      return {std::make_shared<LpSplitQuantizer>(d, B, split_p), split_p, q};
    }
    if (name == "identity") return {std::make_shared<IdentityQuantizer>(d, B), 2, 2};
    throw ParamError("unknown quantizer '" + name +
                     "' (ratq, subsampled-ratq, aratq, aratq+, simq, simq+, lp-split, identity)");
  }

  void run(const Common& c) const {
    const std::size_t trials = c.trials_or(10000);
    Csv csv({"quantizer", "d", "B", "r_bits", "input_norm", "moment_norm",
             "second_moment", "bound_alpha_sq", "bias_norm_l2", "bias_band_l2"});
    std::uint64_t idx = 0;
    for (const auto& name : quantizers) {
      for (std::size_t d : dims) {
        Made m = make(name, d);
        SeedPath root(c.derive(idx++));
        Vec y = random_point(d, m.input_p, B, root.child(Tag::Input).stream());
        RunningStats mom;
        VectorStats st(d);
        std::size_t longest = 0;
        for (std::size_t t = 0; t < trials; ++t) {
          SeedPath p = root.child(Tag::Trial, t);
          BitString msg = m.q->encode(y, {}, p);
          longest = std::max(longest, msg.size());
          Vec out = m.q->decode(msg, {}, p);
          double n = norm_p(out, m.moment_p);
          mom.add(n * n);
          st.add(out);
        }
        auto mean = st.mean();
        auto se = st.stderr_mean();
        double bias = 0, s2 = 0;
        for (std::size_t i = 0; i < d; ++i) {
          bias += (mean[i] - y[i]) * (mean[i] - y[i]);
          s2 += se[i] * se[i];
        }
        auto alpha = m.q->alpha_bound();
        csv.cell(name).cell(d).cell(B).cell(m.q->bit_budget().value_or(longest));
        csv.cell(m.input_p).cell(m.moment_p).cell(mom.mean());
        if (alpha) csv.cell(*alpha * *alpha); else csv.blank();
        csv.cell(std::sqrt(bias)).cell(3 * std::sqrt(s2));
        csv.end_row();
      }
    }
    csv.write(c.out);
  }
};

// ---- dme-bench -------------------------------------------------------------

struct DmeBench {
  std::vector<std::string> settings{"no-side"};
  std::size_t n = 10, d = 256;
  std::vector<std::size_t> rs{16, 32, 64};
  std::vector<double> deltas{0.1, 1.0};  // cycled over clients

  DmeInstance instance(std::size_t r, bool side, std::uint64_t seed) const {
    if (deltas.empty()) throw ParamError("delta list is empty");
    DmeInstance I;
    I.n = n;
    I.d = d;
    I.r = r;
    Stream s(seed);
    Vec c = random_point(d, 2, 0.3, Stream(s.next()));
    for (std::size_t i = 0; i < n; ++i) {
      double D = deltas[i % deltas.size()];
      if (!(D >= 0 && D <= 1)) throw ParamError("delta values must lie in [0, 1]");
      Vec u = random_point(d, 2, D / 2, Stream(s.next()));
      Vec x(d), y(d);
      for (std::size_t j = 0; j < d; ++j) {
        x[j] = c[j] + u[j];
        y[j] = c[j] - u[j];
      }
      I.x.push_back(x);
      if (side) {
        I.y.push_back(y);
        I.Delta.push_back(D);
      }
    }
    return I;
  }

  void run(const Common& c) const {
    const std::size_t trials = c.trials_or(1000);
    Csv csv({"setting", "n", "d", "r", "delta_mean_sq", "delta_max", "mse", "band_3sigma",
             "bound", "bits_max"});
    std::uint64_t idx = 0;
    for (const auto& sname : settings) {
      DmeSetting s = parse_setting(sname);
      for (std::size_t r : rs) {
        const std::uint64_t seed = c.derive(idx++);
        const bool side = s != DmeSetting::NoSide;
        DmeInstance I = instance(r, side, seed);
        std::vector<std::shared_ptr<const VectorQuantizer>> qs;
        if (s == DmeSetting::NoSide) {
          qs.assign(n, make_subsampled_ratq(d, 1.0, r));
        } else if (s == DmeSetting::Known || s == DmeSetting::KnownLarge) {
          auto plan = configure_known_delta(n, d, r, I.Delta);
          s = plan.large_precision ? DmeSetting::KnownLarge : DmeSetting::Known;
          qs = build(plan);
        } else {
          auto plan = configure_unknown_delta(d, r);
          s = plan.boosted ? DmeSetting::UnknownLarge : DmeSetting::Unknown;
          qs.assign(n, build(plan));
        }
        auto res = run_dme(I, [&](std::size_t i) { return qs[i]; }, seed, trials);
        double msq = 0, mx = 0;
        for (double D : I.Delta) {
          msq += D * D / n;
          mx = std::max(mx, D);
        }
        csv.cell(to_string(s)).cell(n).cell(d).cell(r).cell(msq).cell(mx);
        csv.cell(res.mse).cell(res.band).cell(theoretical_bound(s, n, d, r, I.Delta));
        csv.cell(res.max_bits).end_row();
      }
    }
    csv.write(c.out);
  }
};

// ---- opt-bench -------------------------------------------------------------

struct OptBench {
  std::string objective = "quadratic";  // or "hard"
  std::size_t d = 32;
  std::vector<std::string> quantizers{"identity", "ratq"};
  std::vector<std::size_t> horizons{256, 1024, 4096};
  bool strongly_convex = false;
  double sigma = 0.5;
  bool trace = false;

  void run(const Common& c) const {
    if (d < 2) throw ParamError("opt-bench: d must be >= 2");
    if (horizons.empty()) throw ParamError("opt-bench: no horizons");
    for (std::size_t T : horizons)
      if (T == 0) throw ParamError("opt-bench: T must be positive");
    const std::size_t reps = c.trials_or(20);
    const double gamma = strongly_convex ? 1.0 : 0.0;

    std::unique_ptr<GradientOracle> oracle;
    std::unique_ptr<Domain> dom;
    Vec start(d, 0.0);
    double B, D;  // gradient bound, l2 diameter
    if (objective == "quadratic") {
      // f(x) = ||x - x0||^2 / 2 on the unit l2 ball, started at -e_2
      Vec x0(d, 0.0);
      x0[0] = 0.3;
      start[1] = -1.0;
      B = 1.3 + sigma;  // sup ||x - x0|| over the ball plus noise
      oracle = std::make_unique<QuadraticOracle>(x0, 1.0, sigma, B);
      dom = std::make_unique<L2Ball>(d, 1.0);
      D = 2.0;
    } else if (objective == "hard") {
      // noisy piecewise-linear instance on a box, gap ~ 1/sqrt(T)
      if (strongly_convex) throw ParamError("opt-bench: the hard objective is not strongly convex");
      std::vector<int> v(d);
      Stream s(c.derive(0xfeed));
      for (auto& vi : v) vi = s.coin() ? 1 : -1;
      B = 1.0;
      D = 2.0;
      auto h = std::make_unique<HardInstanceOracle>(v, 1.0 / 6.0, B, 2.0, D);
      dom = std::make_unique<Box>(h->domain());
      oracle = std::move(h);
    } else {
      throw ParamError("opt-bench: unknown objective '" + objective + "' (quadratic, hard)");
    }
    const GradientOracle& f = *oracle;

    Csv csv({"row", "quantizer", "T", "step", "f_gap", "bits_cum", "bound", "loglog_slope"});
    std::uint64_t idx = 0;
    for (const auto& name : quantizers) {
      std::shared_ptr<const VectorQuantizer> q;
      if (name == "identity") q = std::make_shared<IdentityQuantizer>(d, B);
      else if (name == "ratq") q = std::make_shared<RatqQuantizer>(RatqConfig::defaults(d, B));
      else if (name == "aratq") q = make_aratq(d, B, horizons.back(), GainMode::Aguq);
      else throw ParamError("opt-bench: unknown quantizer '" + name + "' (identity, ratq, aratq)");
      const double alpha = *q->alpha_bound();

      std::vector<double> lx, ly, gaps, bounds;
      std::vector<OptResult> traces;
      for (std::size_t T : horizons) {
        RunningStats gap;
        for (std::size_t s = 0; s < reps; ++s) {
          OptOptions oo;
          oo.keep_trace = trace && s == 0;
          auto res = psgd_run(f, *q, *dom, start, T, gamma, c.derive(idx++), oo);
          gap.add(res.final_gap);
          if (trace && s == 0) traces.push_back(std::move(res));
        }
        gaps.push_back(gap.mean());
        bounds.push_back(strongly_convex ? 2 * alpha * alpha / (gamma * T)
                                         : D * alpha / std::sqrt(double(T)));
        lx.push_back(std::log(double(T)));
        ly.push_back(std::log(std::max(gap.mean(), 1e-300)));
      }
      const double slope = horizons.size() > 1 ? ls_slope(lx, ly) : NAN;
      for (std::size_t k = 0; k < horizons.size(); ++k) {
        csv.cell(std::string("summary")).cell(name).cell(horizons[k]).cell(horizons[k]);
        csv.cell(gaps[k]).blank().cell(bounds[k]);
        if (std::isnan(slope)) csv.blank(); else csv.cell(slope);
        csv.end_row();
      }
      for (std::size_t k = 0; k < traces.size(); ++k) {
        const auto& tr = traces[k];
        for (std::size_t t = 0; t < tr.trace.size(); ++t) {
          csv.cell(std::string("trace")).cell(name).cell(horizons[k]).cell(t + 1).cell(tr.trace[t]);
          csv.cell(tr.bits_cum[t]).blank().blank().end_row();
        }
      }
    }
    csv.write(c.out);
  }
};

// ---- rd-bench --------------------------------------------------------------

struct RdBench {
  std::vector<std::string> modes{"rd", "wz"};
  std::vector<std::string> sources{"gauss"};
  std::size_t d = 4096;
  double v = 1.0, D = 1.0 / 16;
  double sigma_z = 0.1;
  double D_wz = 0;  // 0: sigma_z^2 / 400

  // Laplace with b = scale/sqrt 2 cut at |x| <= 3 scale; variance factor ~0.9 scale^2
  static double draw(const std::string& src, double scale, Stream& s) {
    if (src == "gauss") return scale * s.normal();
    if (src == "trunc-laplace") {
      const double b = scale / std::sqrt(2.0);
      double x;
      do {
        double u = s.uniform() - 0.5;
        x = -b * (u < 0 ? -1.0 : 1.0) * std::log(1 - 2 * std::abs(u));
      } while (std::abs(x) > 3 * scale);
      return x;
    }
    throw ParamError("unknown source '" + src + "' (gauss, trunc-laplace)");
  }

  void run(const Common& c) const {
    const std::size_t blocks = c.trials_or(100);
    Csv csv({"mode", "source", "d", "variance", "D", "rate_bits_per_dim", "rd_bits_per_dim",
             "rate_slack_allowed", "mse_per_dim", "mse_ok"});
    std::uint64_t idx = 0;
    for (const auto& mode : modes) {
      if (mode != "rd" && mode != "wz") throw ParamError("unknown mode '" + mode + "' (rd, wz)");
      for (const auto& src : sources) {
        SeedPath root(c.derive(idx++));
        Stream gen = root.child(Tag::Input).stream();
        RunningStats mse;
        double rate, rd, slack, var, dist;
        Vec x(d), y(d);
        if (mode == "rd") {
          auto P = GaussRdParams::make(d, v, D);
          GaussRdQuantizer q(P);
          for (std::size_t b = 0; b < blocks; ++b) {
            for (auto& xi : x) xi = draw(src, std::sqrt(v), gen);
            mse.add(dist2_sq(x, q.quantize(x, {}, root.child(Tag::Trial, b))) / double(d));
          }
          rate = P.rate(), rd = P.rd_function(), slack = 6, var = v, dist = D;
        } else {
          const double Dw = D_wz > 0 ? D_wz : sigma_z * sigma_z / 400;
          auto P = GaussWzParams::make(d, sigma_z, Dw);
          GaussWzQuantizer q(P);
          for (std::size_t b = 0; b < blocks; ++b) {
            for (std::size_t i = 0; i < d; ++i) {
              y[i] = gen.normal();
              x[i] = y[i] + draw(src, sigma_z, gen);
            }
            mse.add(dist2_sq(x, q.quantize(x, y, root.child(Tag::Trial, b))) / double(d));
          }
          rate = P.rate(), rd = P.rd_function(), slack = 8, var = sigma_z * sigma_z, dist = Dw;
        }
        csv.cell(mode).cell(src).cell(d).cell(var).cell(dist).cell(rate).cell(rd).cell(slack);
        csv.cell(mse.mean()).cell(mse.mean() <= dist).end_row();
      }
    }
    csv.write(c.out);
  }
};

}  // namespace

void add_quantize_bench(CLI::App& app, Common& common) {
  auto b = std::make_shared<QuantizeBench>();
  auto* sub = add_command(app, "quantize-bench", "second moment and bias of vector quantizers",
                          [&common, b] { b->run(common); });
  sub->add_option("--quantizers", b->quantizers)->delimiter(',')->capture_default_str();
  sub->add_option("--dims", b->dims)->delimiter(',')->capture_default_str();
  sub->add_option("--B", b->B)->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--r", b->r, "subsampled RATQ precision (0: d)");
  sub->add_option("--simq_p", b->simq_p)->capture_default_str();
  sub->add_option("--simq_k", b->simq_k, "SimQ+ repetitions (0: default)");
  sub->add_option("--split_p", b->split_p)->capture_default_str();
  sub->add_option("--horizon", b->horizon, "A-RATQ T")->capture_default_str();
}

void add_dme_bench(CLI::App& app, Common& common) {
  auto b = std::make_shared<DmeBench>();
  auto* sub = add_command(app, "dme-bench", "distributed mean estimation sweeps",
                          [&common, b] { b->run(common); });
  sub->add_option("--settings", b->settings, "no-side, known, unknown")
      ->delimiter(',')->capture_default_str();
  sub->add_option("--n", b->n)->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--d", b->d)->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--r", b->rs)->delimiter(',')->capture_default_str();
  sub->add_option("--delta", b->deltas, "Delta values, cycled over clients")
      ->delimiter(',')->capture_default_str();
}

void add_opt_bench(CLI::App& app, Common& common) {
  auto b = std::make_shared<OptBench>();
  auto* sub = add_command(app, "opt-bench", "quantized projected SGD on a quadratic",
                          [&common, b] { b->run(common); });
  sub->add_option("--objective", b->objective, "quadratic or hard")->capture_default_str();
  sub->add_option("--d", b->d)->capture_default_str();
  sub->add_option("--quantizers", b->quantizers)->delimiter(',')->capture_default_str();
  sub->add_option("--T", b->horizons)->delimiter(',')->capture_default_str();
  sub->add_option("--strongly_convex", b->strongly_convex)->capture_default_str();
  sub->add_option("--sigma", b->sigma)->check(CLI::NonNegativeNumber)->capture_default_str();
  sub->add_option("--trace", b->trace, "emit per-step rows for the first replication")
      ->capture_default_str();
}

void add_rd_bench(CLI::App& app, Common& common) {
  auto b = std::make_shared<RdBench>();
  auto* sub = add_command(app, "rd-bench", "Gaussian rate-distortion and Wyner-Ziv blocks",
                          [&common, b] { b->run(common); });
  sub->add_option("--modes", b->modes, "rd, wz")->delimiter(',')->capture_default_str();
  sub->add_option("--sources", b->sources, "gauss, trunc-laplace")
      ->delimiter(',')->capture_default_str();
  sub->add_option("--d", b->d)->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--v", b->v)->capture_default_str();
  sub->add_option("--D", b->D)->capture_default_str();
  sub->add_option("--sigma_z", b->sigma_z)->capture_default_str();
  sub->add_option("--D_wz", b->D_wz, "0: sigma_z^2/400");
}

}  // namespace qtk::cli
