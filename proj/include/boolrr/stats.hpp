#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace boolrr {

// A Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;

  // value <= bound + k * std_error
  bool at_most(double bound, double k = 3.0) const { return value <= bound + k * std_error; }
  bool within(double target, double k = 3.0) const { return std::abs(value - target) <= k * std_error; }
};

inline Estimate proportion(std::int64_t successes, std::int64_t trials) {
  if (trials <= 0) throw std::invalid_argument("proportion: trials must be positive");
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

// Sample mean with standard error, summed in index order.
inline Estimate sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("sample_mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  const double m = s / static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  const double n = static_cast<double>(xs.size());
  const double var = xs.size() > 1 ? v / (n - 1.0) : 0.0;
  return {m, std::sqrt(var / n), static_cast<std::int64_t>(xs.size())};
}

// Linear-interpolation quantile of a sorted sample.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Total variation distance between an empirical histogram and a target law.
template <class Key>
double total_variation(const std::map<Key, std::int64_t>& counts, std::int64_t total,
                       const std::map<Key, double>& target) {
  double tv = 0.0;
  for (const auto& [k, p] : target) {
    const auto it = counts.find(k);
    const double q = it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
    tv += std::abs(p - q);
  }
  for (const auto& [k, c] : counts) {
    if (target.count(k) == 0) tv += static_cast<double>(c) / static_cast<double>(total);
  }
  return tv / 2.0;
}

}  // namespace boolrr
