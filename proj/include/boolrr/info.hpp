#pragma once

// Entropy and divergence in bits.

#include <cmath>
#include <span>
#include <stdexcept>

namespace boolrr {

// H(x) = x log 1/x + (1-x) log 1/(1-x), with H(0) = H(1) = 0.
inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// KL(Bern(p) || Bern(1/2)) = 1 - H(p).
inline double kl_vs_fair_coin(double p) { return 1.0 - binary_entropy(p); }

// sum_x p(x) log p(x)/q(x). Infinite when p is not absolutely continuous w.r.t. q.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return INFINITY;
    s += p[i] * std::log2(p[i] / q[i]);
  }
  return s;
}

}  // namespace boolrr
