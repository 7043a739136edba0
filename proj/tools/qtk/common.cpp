#include "common.hpp"

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "qtk/errors.hpp"

namespace qtk::cli {

void Csv::row_strings(const std::vector<std::string>& r) {
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].find_first_of(",\n\r") != std::string::npos)
      throw std::logic_error("csv field with a separator: " + r[i]);
    if (i) text_ += ',';
    text_ += r[i];
  }
  text_ += '\n';
}

void Csv::end_row() {
  if (cur_.size() != cols_)
    throw std::logic_error("csv row has " + std::to_string(cur_.size()) + " fields, header has " +
                           std::to_string(cols_));
  row_strings(cur_);
  cur_.clear();
}

void Csv::write(const std::string& path) const {
  if (path.empty() || path == "-") {
    std::fwrite(text_.data(), 1, text_.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text_;
  if (!f.flush()) throw std::runtime_error("write to " + path + " failed");
}

namespace {

void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw ParamError("cannot open config " + path);
  for (const auto& item : CLI::ConfigTOML().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    const std::string key = item.fullname();
    CLI::Option* opt = item.parents.empty() ? sub->get_option_no_throw("--" + item.name) : nullptr;
    if (!opt || item.name == "config")
      throw ParamError("config " + path + ": unknown key '" + key + "' for " + sub->get_name());
    if (opt->count()) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

}  // namespace

CLI::App* add_command(CLI::App& app, const char* name, const char* desc,
                      std::function<void()> run) {
  CLI::App* sub = app.add_subcommand(name, desc);
  auto path = std::make_shared<std::string>();
  sub->add_option("--config", *path, "parameter file");
  sub->callback([sub, path, run = std::move(run)] {
    if (!path->empty()) apply_config(sub, *path);
    run();
  });
  return sub;
}

PmfTable read_pmf_table(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open pmf table " + path);
  PmfTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    for (char& c : line)
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    std::istringstream in(line);
    std::string sym, prob, extra;
    if (!(in >> sym)) continue;
    if (!(in >> prob) || (in >> extra))
      throw ParamError(path + ":" + std::to_string(lineno) + ": expected 'symbol probability'");
    std::size_t used = 0;
    double p = 0;
    try {
      p = std::stod(prob, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != prob.size())
      throw ParamError(path + ":" + std::to_string(lineno) + ": bad probability '" + prob + "'");
    t.symbols.push_back(sym);
    t.P.push_back(p);
  }
  if (t.P.empty()) throw ParamError(path + ": empty pmf table");
  validate_pmf(t.P, 1e-9);
  return t;
}

std::vector<Source> pmf_sources(const std::string& pmf_path, const std::vector<double>& zipf_s,
                                std::size_t zipf_n) {
  std::vector<Source> out;
  if (!pmf_path.empty()) {
    out.push_back({pmf_path.substr(pmf_path.find_last_of('/') + 1), read_pmf_table(pmf_path)});
    if (!zipf_s.empty()) throw ParamError("give either pmf or zipf_s, not both");
    return out;
  }
  if (zipf_s.empty()) throw ParamError("no source: set pmf or zipf_s");
  for (double s : zipf_s) {
    Source src;
    char buf[48];
    std::snprintf(buf, sizeof buf, "zipf-%g-%zu", s, zipf_n);
    src.name = buf;
    src.table.P = zipf(s, zipf_n);
    for (std::size_t i = 1; i <= zipf_n; ++i) src.table.symbols.push_back(std::to_string(i));
    out.push_back(std::move(src));
  }
  return out;
}

}  // namespace qtk::cli
