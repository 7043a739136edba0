#include <cstdio>
#include <exception>
#include <string>

#include "common.hpp"

namespace {

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qtk::cli;
  CLI::App app{"qtk: quantizer, mean-estimation, optimization and age-of-information benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "root seed")->capture_default_str();
  app.add_option("--trials", common.trials, "Monte-Carlo trials (0: command default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", common.out, "CSV output path (default stdout)");

  add_quantize_bench(app, common);
  add_dme_bench(app, common);
  add_opt_bench(app, common);
  add_rd_bench(app, common);
  add_aoi_solve(app, common);
  add_aoi_sim(app, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "qtk: %s\n", one_line(e.what()).c_str());
    return e.get_exit_code() ? e.get_exit_code() : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qtk: error: %s\n", one_line(e.what()).c_str());
    return 1;
  }
  return 0;
}
