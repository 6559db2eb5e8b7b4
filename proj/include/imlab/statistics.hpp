#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace imlab {

/// SplitMix64 finalizer; used to derive independent streams from (seed, path).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Welford mean/variance with an associative merge.
class RunningStats {
 public:
  void push(double x);
  void merge(const RunningStats& other);

  long count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance (0 for fewer than two samples).
  double variance() const;
  double stderr_of_mean() const;
  double min() const { return min_; }
  double max() const { return max_; }

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

/// Splits a series into `batches` contiguous batches and returns their means;
/// the tail that does not fill a batch is dropped.
std::vector<double> batch_means(const std::vector<double>& series, int batches);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long batches = 0;
};

/// Pooled batch-means estimate from per-path batch means: grand mean and the
/// standard error sd(batch means) / sqrt(total batches).
MeanEstimate pooled_estimate(const std::vector<std::vector<double>>& per_path_batches);

/// Algorithm R: a uniform sample of fixed capacity from a stream of unknown
/// length. Every offered item ends up in the sample with probability
/// capacity / offered.
template <typename T>
class Reservoir {
 public:
  explicit Reservoir(std::size_t capacity = 0, std::uint64_t seed = 0) : capacity_(capacity), rng_(seed) {}

  void offer(const T& item) {
    ++seen_;
    if (items_.size() < capacity_) {
      items_.push_back(item);
      return;
    }
    std::uniform_int_distribution<std::uint64_t> pick(0, seen_ - 1);
    const std::uint64_t j = pick(rng_);
    if (j < capacity_) items_[static_cast<std::size_t>(j)] = item;
  }

  const std::vector<T>& items() const { return items_; }
  std::vector<T>& items() { return items_; }
  std::uint64_t seen() const { return seen_; }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::mt19937_64 rng_;
  std::uint64_t seen_ = 0;
  std::vector<T> items_;
};

}  // namespace imlab
