#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace redunsense::stats {

double mean(std::span<const double> xs);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> xs);

/// Sample variance (n - 1 denominator); 0 for fewer than two values.
double sample_variance(std::span<const double> xs);

/// Linear-interpolation percentile, p in [0, 1]. NaN for an empty input.
double percentile(std::span<const double> xs, double p);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool excludes_zero() const { return lo > 0.0 || hi < 0.0; }
};

/// Percentile bootstrap interval for statistic(resampled indices) over n items.
/// Resampling is keyed on `seed`, so the interval is reproducible.
Interval bootstrap_ci(std::size_t n,
                      const std::function<double(std::span<const std::size_t>)>& statistic,
                      double level = 0.95, int resamples = 2000, std::uint64_t seed = 0);

/// Bootstrap interval for the mean of paired differences a[i] - b[i].
Interval paired_mean_difference_ci(std::span<const double> a, std::span<const double> b,
                                   double level = 0.95, int resamples = 2000,
                                   std::uint64_t seed = 0);

}  // namespace redunsense::stats
