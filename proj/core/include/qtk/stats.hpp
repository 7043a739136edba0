#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qtk {

// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;   // unbiased sample variance
  double stderr_mean() const;  // sqrt(variance / n)

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0;
};

// Per-coordinate mean/variance of a stream of vectors.
class VectorStats {
 public:
  explicit VectorStats(std::size_t d) : acc_(d) {}
  void add(std::span<const double> v);
  std::vector<double> mean() const;
  std::vector<double> stderr_mean() const;
  // sum of per-coordinate variances (trace of the covariance)
  double total_variance() const;
  std::size_t count() const { return acc_.empty() ? 0 : acc_[0].count(); }

 private:
  std::vector<RunningStats> acc_;
};

// Least-squares slope of y on x.
double ls_slope(std::span<const double> x, std::span<const double> y);

}  // namespace qtk
