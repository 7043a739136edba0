#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qtk/bits.hpp"
#include "qtk/random.hpp"

namespace qtk {

enum class GridMode { Signed, Nonnegative };

// Uniform levels on [-M,M] (signed) or [0,M] (nonnegative), k >= 2 levels.
struct UniformGrid {
  double M = 1.0;
  std::uint32_t k = 2;
  GridMode mode = GridMode::Signed;

  UniformGrid() = default;
  UniformGrid(double M_, std::uint32_t k_, GridMode mode_ = GridMode::Signed);

  double lo() const { return mode == GridMode::Signed ? -M : 0.0; }
  double spacing() const { return (mode == GridMode::Signed ? 2.0 * M : M) / (k - 1); }
  double level(std::uint32_t l) const { return lo() + l * spacing(); }
  bool contains(double y) const { return y <= M && y >= lo(); }
  std::uint32_t empty_symbol() const { return k; }
  unsigned symbol_bits() const { return ceil_log2(std::uint64_t{k} + 1); }
};

// Two-branch law of one coordinate: symbol `low` w.p. 1-p_up, low+1 w.p. p_up.
struct CellDraw {
  std::uint32_t low = 0;
  double p_up = 0.0;
  bool overflow = false;
};

CellDraw cuq_cell(double y, const UniformGrid& g);
std::uint32_t cuq_encode_one(double y, const UniformGrid& g, Stream& s);
double cuq_decode_one(std::uint32_t sym, const UniformGrid& g);

std::vector<std::uint32_t> cuq_encode(std::span<const double> y, const UniformGrid& g, Stream& s);
std::vector<double> cuq_decode(std::span<const std::uint32_t> sym, const UniformGrid& g);

// Closed-form E[decode] and E[(decode-y)^2] for one coordinate.
double cuq_expected(double y, const UniformGrid& g);
double cuq_mse(double y, const UniformGrid& g);

struct ModuloParams {
  std::uint32_t k = 4;
  double delta_prime = 0.0;
  double eps = 0.0;

  // eps = 2 delta'/(k-2); needs k >= 3.
  static ModuloParams with_default_eps(std::uint32_t k, double delta_prime);
  bool recovery_condition() const { return k * eps >= 2.0 * (eps + delta_prime) * (1 - 1e-12); }
  unsigned symbol_bits() const { return ceil_log2(k); }
};

struct MqEncoded {
  std::int64_t z = 0;  // sampled lattice index
  std::uint32_t w = 0;  // z mod k
};

MqEncoded mq_encode(double x, const ModuloParams& p, Stream& s);
double mq_decode(std::uint32_t w, double y_side, const ModuloParams& p);

struct MqResult {
  std::uint32_t w = 0;
  double reconstruction = 0.0;
};
MqResult mq_quantize(double x, double y_side, const ModuloParams& p, Stream& s);

}  // namespace qtk
