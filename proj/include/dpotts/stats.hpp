#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace dpotts::stats {

struct MeanError {
  double mean = 0.0;
  double standard_error = std::numeric_limits<double>::quiet_NaN();
  std::size_t samples = 0;
};

/// Mean and standard error of independent values; the error is NaN for
/// fewer than two values. Summation runs in index order.
inline MeanError independent(std::span<const double> x) {
  MeanError r;
  r.samples = x.size();
  if (x.empty()) return r;
  double sum = 0.0;
  for (double v : x) sum += v;
  r.mean = sum / static_cast<double>(x.size());
  if (x.size() < 2) return r;
  double ss = 0.0;
  for (double v : x) ss += (v - r.mean) * (v - r.mean);
  r.standard_error = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
  return r;
}

/// Batch-means estimate for a correlated series: the series is cut into
/// `batches` equal consecutive blocks (a remainder at the start is dropped)
/// and the block means are treated as independent.
inline MeanError batch_means(std::span<const double> x, std::size_t batches = 20) {
  if (batches < 2 || x.size() < batches) {
    MeanError r = independent(x);
    r.standard_error = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const std::size_t per = x.size() / batches;
  const std::size_t skip = x.size() - per * batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    double sum = 0.0;
    for (std::size_t i = skip + b * per; i < skip + (b + 1) * per; ++i) sum += x[i];
    means.push_back(sum / static_cast<double>(per));
  }
  MeanError r = independent(means);
  r.samples = per * batches;
  return r;
}

}  // namespace dpotts::stats
