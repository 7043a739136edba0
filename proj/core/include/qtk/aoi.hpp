#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qtk/bits.hpp"

namespace qtk {

using Pmf = std::vector<double>;

// throws unless entries are >= 0, finite and sum to 1 within tol
void validate_pmf(std::span<const double> P, double tol = 1e-12);
Pmf zipf(double s, std::size_t N);  // P(i) ~ i^{-s}, i = 1..N
double entropy(std::span<const double> P);  // bits
double kl_divergence(std::span<const double> P, std::span<const double> Q);  // bits

// ---- lengths and codes -----------------------------------------------------

enum class LengthMode { Real, Integer };

// -log2 P(x), or its ceiling. Zero-probability symbols get length 0 and are
// ignored by every statistic below.
std::vector<double> shannon_lengths(std::span<const double> P, LengthMode mode);
double kraft_sum(std::span<const double> lengths, std::span<const double> P = {});

// canonical prefix code; lengths >= 1, <= 63, Kraft sum <= 1
std::vector<BitString> build_prefix_code(std::span<const unsigned> lengths);
bool is_prefix_free(std::span<const BitString> code);

struct LengthMoments {
  double m1 = 0, m2 = 0;  // E L, E L^2 over X ~ P
};
LengthMoments length_moments(std::span<const double> lengths, std::span<const double> P);

// ---- closed forms ----------------------------------------------------------

// E L + E L^2 / (2 E L) - 1/2
double average_age(std::span<const double> lengths, std::span<const double> P);
// L(theta) = l(x) w.p. P(x) theta(x), else l_empty
// E L(theta)/E theta + E L(theta)^2 / (2 E L(theta)) - 1/2
double average_age_randomized(std::span<const double> lengths, std::span<const double> theta,
                              double l_empty, std::span<const double> P);
// base/(1 - eps) + eps/(2(1 - eps))
double average_age_erasure(double base_age, double eps);
// E L + E L^2 / (2 (L_th - E L)); needs E L < L_th
double average_delay(std::span<const double> lengths, std::span<const double> P, double L_th);

// ---- simulator -------------------------------------------------------------

struct SimOptions {
  std::vector<double> theta;  // empty: always transmit
  double l_empty = 0;         // length of the "skip" codeword
  double eps = 0;             // bit erasure probability, repeat until received
  std::size_t batches = 50;
};

struct SimResult {
  double age = 0;   // (1/T) sum_t (t - U(t))
  double ci = 0;    // standard error from batch means of renewal cycles
  std::size_t cycles = 0, updates = 0;
};

// One bit per slot. The channel picks up the symbol generated in the slot it
// frees up; everything generated while busy is dropped.
SimResult simulate_update_scheme(std::span<const BitString> code, std::span<const double> P,
                                 std::uint64_t T, std::uint64_t seed, const SimOptions& opt = {});

// ---- variational formula ---------------------------------------------------

// ||X||_p for X ~ P
double lp_norm(std::span<const double> x, std::span<const double> P, double p);
// E[(dQ/dP)^{1/p'} |X|], p' = p/(p-1)
double lp_norm_variational(std::span<const double> x, std::span<const double> P, double p,
                           std::span<const double> Q);
// Q(x) = P(x) |x|^p / ||X||_p^p
Pmf variational_maximizer(std::span<const double> x, std::span<const double> P, double p);

// ---- tilted codes ----------------------------------------------------------

enum class TiltKind { Age, Delay };

// g(x) = (1 -+ z^2/2) P(x) + z sqrt(Q(x) P(x)), minus for age, plus for delay.
// nullopt when some g(x) < 0.
std::optional<Pmf> tilted_pmf(double z, std::span<const double> Q, std::span<const double> P,
                              TiltKind kind = TiltKind::Age);

struct TiltSolution {
  double z = 0;
  Pmf Q, Pstar;       // over the input alphabet, zero where P is zero
  double value = 0;   // sum g log(S/g) (minus z^2 L_th/2 for delay)
  double gap = 0;     // cost at Shannon lengths of P* minus value
  double kl = 0;      // D(P || P*)
  bool certified = false;
  bool degenerate = false;  // point mass
  std::size_t restart = 0, iterations = 0;
};

struct TiltOptions {
  std::size_t restarts = 4;
  double tol = 1e-6;
  std::size_t max_iter = 20000;
  std::uint64_t seed = 1;
};

TiltSolution optimize_age(std::span<const double> P, const TiltOptions& opt = {});
// needs L_th > H(P) + log2(1 + 1/sqrt 2)
TiltSolution optimize_delay(std::span<const double> P, double L_th, const TiltOptions& opt = {});

inline constexpr double kKlBound = 0.7715533031;  // log2(1 + 1/sqrt 2)

}  // namespace qtk
