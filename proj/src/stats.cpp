#include "redunsense/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "redunsense/rng.hpp"

namespace redunsense::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double sample_std(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

double percentile(std::span<const double> xs, double p) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval bootstrap_ci(std::size_t n,
                      const std::function<double(std::span<const std::size_t>)>& statistic,
                      double level, int resamples, std::uint64_t seed) {
  if (n == 0 || resamples < 1) throw std::invalid_argument("bootstrap needs data and resamples");
  std::mt19937_64 engine(rng::derive_key(seed, rng::Stream::bootstrap, n));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> idx(n);
  std::vector<double> values(static_cast<std::size_t>(resamples));
  for (double& v : values) {
    for (std::size_t& i : idx) i = pick(engine);
    v = statistic(idx);
  }
  const double tail = (1.0 - level) / 2.0;
  return Interval{percentile(values, tail), percentile(values, 1.0 - tail)};
}

Interval paired_mean_difference_ci(std::span<const double> a, std::span<const double> b,
                                   double level, int resamples, std::uint64_t seed) {
  if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in length");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return bootstrap_ci(
      diff.size(),
      [&](std::span<const std::size_t> idx) {
        double s = 0.0;
        for (std::size_t i : idx) s += diff[i];
        return s / static_cast<double>(idx.size());
      },
      level, resamples, seed);
}

}  // namespace redunsense::stats
