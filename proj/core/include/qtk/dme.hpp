#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qtk/errors.hpp"
#include "qtk/quantizer.hpp"
#include "qtk/sideinfo.hpp"
#include "qtk/vecquant.hpp"

namespace qtk {

struct DmeInstance {
  std::size_t n = 0, d = 0;
  std::vector<Vec> x;
  std::vector<Vec> y;            // empty: no side information (y_i = 0)
  std::vector<double> Delta;     // per client; empty when unknown
  std::size_t r = 0;             // bits per client

  Vec true_mean() const;
  bool has_side() const { return !y.empty(); }
  void validate() const;
};

struct BudgetOverflow : Error {
  BudgetOverflow(std::size_t client, std::size_t used, std::size_t budget);
  std::size_t client;
};

using QuantizerFactory = std::function<std::shared_ptr<const VectorQuantizer>(std::size_t client)>;

struct DmeResult {
  double mse = 0.0;       // mean over trials of ||estimate - mean||^2
  double band = 0.0;      // 3 sigma of the mean
  std::size_t trials = 0;
  std::size_t max_bits = 0;  // over clients and trials
  Vec estimate;           // from the last trial
};

// Client i in trial t uses root.child(Trial,t).child(Client,i) on both ends.
DmeResult run_dme(const DmeInstance& inst, const QuantizerFactory& factory, std::uint64_t seed,
                  std::size_t trials);

struct KnownDeltaPlan {
  std::vector<RmqConfig> cfg;  // one per client
  std::size_t mu_d = 0;
  unsigned log_k = 0;
  bool large_precision = false;
};

// r <= d: log k = ceil(log(2 + sqrt(12 ln n))), delta = Delta/sqrt(n), mu d = floor(r/log k)
// r = m d (m >= 2): log k = m, delta = Delta/(sqrt(n)(2^m - 2)), mu d = d
KnownDeltaPlan configure_known_delta(std::size_t n, std::size_t d, std::size_t r,
                                     const std::vector<double>& Delta);
std::vector<std::shared_ptr<const VectorQuantizer>> build(const KnownDeltaPlan& plan);

struct UnknownDeltaPlan {
  RdaqConfig cfg;
  std::size_t mu_d = 0;
  bool boosted = false;
};

// r < d (well, r not a multiple of d): mu d = floor(r/(h + log h)), needs r >= 2(h + log h)
// r = m d: boosted, N = 2^{floor((m - log h)/h)}
UnknownDeltaPlan configure_unknown_delta(std::size_t d, std::size_t r);
std::shared_ptr<const VectorQuantizer> build(const UnknownDeltaPlan& plan);

enum class DmeSetting { NoSide, Known, Unknown, KnownLarge, UnknownLarge };
DmeSetting parse_setting(const std::string& s);
std::string to_string(DmeSetting s);

// Delta may be empty for NoSide.
double theoretical_bound(DmeSetting s, std::size_t n, std::size_t d, std::size_t r,
                         const std::vector<double>& Delta);

}  // namespace qtk
