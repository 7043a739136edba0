#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qtk/aoi.hpp"
#include "qtk/random.hpp"

namespace qtk::cli {

struct Common {
  std::uint64_t seed = 1;
  std::size_t trials = 0;  // 0: per-command default
  std::string out;         // empty: stdout

  std::size_t trials_or(std::size_t dflt) const { return trials ? trials : dflt; }
  std::uint64_t derive(std::uint64_t k) const { return mix64(seed ^ mix64(k + 0x51a3)); }
};

// Builds the CSV in memory; written in one go so a failed run leaves no
// half-finished file behind.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { row_strings(header); }

  Csv& cell(const std::string& s) {
    cur_.push_back(s);
    return *this;
  }
  Csv& cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return cell(std::string(buf));
  }
  Csv& cell(std::size_t v) { return cell(std::to_string(v)); }
  Csv& cell(unsigned v) { return cell(std::to_string(v)); }
  Csv& cell(bool v) { return cell(std::string(v ? "1" : "0")); }
  Csv& blank() { return cell(std::string()); }
  void end_row();

  void write(const std::string& path) const;

 private:
  void row_strings(const std::vector<std::string>& r);
  std::size_t cols_;
  std::vector<std::string> cur_;
  std::string text_;
};

// Two-column table "symbol probability", whitespace or comma separated,
// '#' starts a comment.
struct PmfTable {
  std::vector<std::string> symbols;
  Pmf P;
};
PmfTable read_pmf_table(const std::string& path);

// pmf from either a file or zipf(s, n)
struct Source {
  std::string name;
  PmfTable table;
};
std::vector<Source> pmf_sources(const std::string& pmf_path, const std::vector<double>& zipf_s,
                                std::size_t zipf_n);

// Subcommand with a --config option. The file is flat "key = value" (TOML
// syntax, lists as "a,b" or [a, b]); keys are the long option names, flags on
// the command line win over the file, unknown keys are an error.
CLI::App* add_command(CLI::App& app, const char* name, const char* desc,
                      std::function<void()> run);

void add_quantize_bench(CLI::App& app, Common& common);
void add_dme_bench(CLI::App& app, Common& common);
void add_opt_bench(CLI::App& app, Common& common);
void add_rd_bench(CLI::App& app, Common& common);
void add_aoi_solve(CLI::App& app, Common& common);
void add_aoi_sim(CLI::App& app, Common& common);

}  // namespace qtk::cli
