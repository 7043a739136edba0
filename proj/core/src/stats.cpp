#include "qtk/stats.hpp"

#include <cmath>

namespace qtk {

void RunningStats::add(double x) {
  ++n_;
  double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double RunningStats::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double RunningStats::stderr_mean() const {
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

void VectorStats::add(std::span<const double> v) {
  for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i].add(v[i]);
}

std::vector<double> VectorStats::mean() const {
  std::vector<double> m(acc_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = acc_[i].mean();
  return m;
}

std::vector<double> VectorStats::stderr_mean() const {
  std::vector<double> m(acc_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = acc_[i].stderr_mean();
  return m;
}

double VectorStats::total_variance() const {
  double s = 0.0;
  for (const auto& a : acc_) s += a.variance();
  return s;
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace qtk
