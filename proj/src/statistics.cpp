#include "imlab/statistics.hpp"

#include <algorithm>
#include <cmath>

namespace imlab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

void RunningStats::push(double x) {
  if (n_ == 0) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double n = static_cast<double>(n_ + other.n_);
  const double delta = other.mean_ - mean_;
  mean_ += delta * static_cast<double>(other.n_) / n;
  m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / n;
  n_ += other.n_;
  min_ = std::min(min_, other.min_);
  max_ = std::max(max_, other.max_);
}

double RunningStats::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double RunningStats::stderr_of_mean() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

std::vector<double> batch_means(const std::vector<double>& series, int batches) {
  std::vector<double> out;
  if (batches <= 0) return out;
  const std::size_t len = series.size() / static_cast<std::size_t>(batches);
  if (len == 0) return out;
  for (int b = 0; b < batches; ++b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < len; ++j) sum += series[static_cast<std::size_t>(b) * len + j];
    out.push_back(sum / static_cast<double>(len));
  }
  return out;
}

MeanEstimate pooled_estimate(const std::vector<std::vector<double>>& per_path_batches) {
  RunningStats s;
  for (const auto& path : per_path_batches) {
    for (double b : path) s.push(b);
  }
  return {s.mean(), s.stderr_of_mean(), s.count()};
}

}  // namespace imlab
