// aoi-solve, aoi-sim
#include <cmath>
#include <memory>

#include "common.hpp"
#include "qtk/errors.hpp"

namespace qtk::cli {

namespace {

double age_of(const Pmf& code_pmf, const Pmf& P, LengthMode m) {
  return average_age(shannon_lengths(code_pmf, m), P);
}

struct SourceKeys {
  std::string pmf;
  std::vector<double> zipf_s;
  std::size_t zipf_n = 256;

  void add(CLI::App* sub) {
    sub->add_option("--pmf", pmf, "two-column table: symbol probability");
    sub->add_option("--zipf_s", zipf_s, "Zipf exponents")->delimiter(',');
    sub->add_option("--zipf_n", zipf_n)->check(CLI::PositiveNumber)->capture_default_str();
  }
};

// ---- aoi-solve -------------------------------------------------------------

struct AoiSolve {
  SourceKeys src;
  double L_th = 0;            // 0: 2H + 2
  std::string table = "summary";  // or "pstar"
  std::size_t restarts = 4;

  void run(const Common& c) const {
    if (table != "summary" && table != "pstar")
      throw ParamError("table must be 'summary' or 'pstar'");
    auto sources = pmf_sources(src.pmf, src.zipf_s, src.zipf_n);
    Csv summary({"instance", "entropy_bits", "age_P_real", "age_P_int", "age_Pstar_real",
                 "age_Pstar_int", "age_certificate_gap", "L_th", "delay_P_real",
                 "delay_Pstar_real", "delay_certificate_gap", "kl_P_Pstar_delay_bits"});
    Csv pstar({"instance", "symbol", "P", "Pstar_age", "Pstar_delay", "len_P_int",
               "len_Pstar_age_int"});
    std::uint64_t idx = 0;
    for (const auto& s : sources) {
      const Pmf& P = s.table.P;
      const double H = entropy(P);
      const double Lth = L_th > 0 ? L_th : 2 * H + 2;
      TiltOptions opt;
      opt.restarts = restarts;
      opt.seed = c.derive(idx++);
      auto age = optimize_age(P, opt);
      auto del = optimize_delay(P, Lth, opt);
      if (table == "summary") {
        summary.cell(s.name).cell(H);
        summary.cell(age_of(P, P, LengthMode::Real)).cell(age_of(P, P, LengthMode::Integer));
        summary.cell(age_of(age.Pstar, P, LengthMode::Real));
        summary.cell(age_of(age.Pstar, P, LengthMode::Integer)).cell(age.gap);
        summary.cell(Lth).cell(average_delay(shannon_lengths(P, LengthMode::Real), P, Lth));
        summary.cell(average_delay(shannon_lengths(del.Pstar, LengthMode::Real), P, Lth));
        summary.cell(del.gap).cell(del.kl).end_row();
      } else {
        auto lp = shannon_lengths(P, LengthMode::Integer);
        auto la = shannon_lengths(age.Pstar, LengthMode::Integer);
        for (std::size_t i = 0; i < P.size(); ++i) {
          pstar.cell(s.name).cell(s.table.symbols[i]).cell(P[i]).cell(age.Pstar[i]);
          pstar.cell(del.Pstar[i]).cell(lp[i]).cell(la[i]).end_row();
        }
      }
    }
    (table == "summary" ? summary : pstar).write(c.out);
  }
};

// ---- aoi-sim ---------------------------------------------------------------

struct AoiSim {
  SourceKeys src;
  std::vector<std::string> codes{"shannon", "tilted"};
  std::uint64_t slots = 1000000;
  double eps = 0;
  std::size_t batches = 50;

  void run(const Common& c) const {
    if (slots == 0) throw ParamError("slots must be positive");
    if (!(eps >= 0 && eps < 1)) throw ParamError("eps must lie in [0, 1)");
    const std::size_t reps = c.trials_or(5);
    auto sources = pmf_sources(src.pmf, src.zipf_s, src.zipf_n);
    Csv csv({"instance", "code", "replication", "slots", "eps", "sim_age_slots", "ci_slots",
             "formula_age_slots"});
    std::uint64_t idx = 0;
    for (const auto& s : sources) {
      const Pmf& P = s.table.P;
      for (const auto& name : codes) {
        Pmf code_pmf;
        if (name == "shannon") {
          code_pmf = P;
        } else if (name == "tilted") {
          TiltOptions opt;
          opt.seed = c.derive(idx);
          code_pmf = optimize_age(P, opt).Pstar;
        } else {
          throw ParamError("unknown code '" + name + "' (shannon, tilted)");
        }
        auto L = shannon_lengths(code_pmf, LengthMode::Integer);
        std::vector<unsigned> li;
        for (double l : L) li.push_back(static_cast<unsigned>(std::lround(l)));
        auto code = build_prefix_code(li);
        // the simulator counts the age at slot boundaries; the erasure
        // formula is stated half a slot later
        double formula = average_age(L, P);
        if (eps > 0) formula = average_age_erasure(formula + 0.5, eps) - 0.5;
        SimOptions so;
        so.eps = eps;
        so.batches = batches;
        for (std::size_t r = 0; r < reps; ++r) {
          auto res = simulate_update_scheme(code, P, slots, c.derive(idx * 1000003 + r), so);
          csv.cell(s.name).cell(name).cell(r).cell(std::to_string(slots)).cell(eps);
          csv.cell(res.age).cell(res.ci).cell(formula).end_row();
        }
        ++idx;
      }
    }
    csv.write(c.out);
  }
};

}  // namespace

void add_aoi_solve(CLI::App& app, Common& common) {
  auto b = std::make_shared<AoiSolve>();
  auto* sub = add_command(app, "aoi-solve", "tilted codes for minimum age and minimum delay",
                          [&common, b] { b->run(common); });
  b->src.add(sub);
  sub->add_option("--L_th", b->L_th, "delay threshold (0: 2H + 2)");
  sub->add_option("--table", b->table, "summary or pstar")->capture_default_str();
  sub->add_option("--restarts", b->restarts)->check(CLI::PositiveNumber)->capture_default_str();
}

void add_aoi_sim(CLI::App& app, Common& common) {
  auto b = std::make_shared<AoiSim>();
  auto* sub = add_command(app, "aoi-sim", "simulate the memoryless update scheme",
                          [&common, b] { b->run(common); });
  b->src.add(sub);
  sub->add_option("--codes", b->codes, "shannon, tilted")->delimiter(',')->capture_default_str();
  sub->add_option("--slots", b->slots)->capture_default_str();
  sub->add_option("--eps", b->eps, "bit erasure probability")->capture_default_str();
  sub->add_option("--batches", b->batches)->check(CLI::PositiveNumber)->capture_default_str();
}

}  // namespace qtk::cli
