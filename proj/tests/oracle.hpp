#pragma once
// Brute-force reference computations. They use only eval() and plain loops,
// so they share no code path with the library's counting or closed forms.

#include <cmath>
#include <cstdint>
#include <vector>

#include "boolrr/bits.hpp"
#include "boolrr/families.hpp"
#include "boolrr/function.hpp"
#include "boolrr/rng.hpp"
#include "boolrr/truth_table.hpp"

namespace oracle {

using boolrr::BitPoint;
using boolrr::BooleanFunction;
using boolrr::PartialPoint;

inline BitPoint point(const std::vector<int>& signs) {
  BitPoint x(static_cast<int>(signs.size()));
  for (std::size_t i = 0; i < signs.size(); ++i) x.set_sign(static_cast<int>(i), signs[i]);
  return x;
}

// 0 in the vector means alive.
inline PartialPoint partial(const std::vector<int>& signs) {
  PartialPoint p(static_cast<int>(signs.size()));
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 0) p.assign(static_cast<int>(i), signs[i]);
  }
  return p;
}

// Returns (ones, completions) so callers can compare exactly.
inline std::pair<std::uint64_t, std::uint64_t> count_completions(const BooleanFunction& f, const PartialPoint& x) {
  std::vector<int> alive;
  for (int i = 0; i < f.arity(); ++i) {
    if (x.is_alive(i)) alive.push_back(i);
  }
  BitPoint base(f.arity());
  for (int i = 0; i < f.arity(); ++i) {
    if (x.is_fixed(i)) base.set_sign(i, x.value(i));
  }
  const std::uint64_t total = std::uint64_t{1} << alive.size();
  std::uint64_t ones = 0;
  for (std::uint64_t c = 0; c < total; ++c) {
    BitPoint y = base;
    for (std::size_t j = 0; j < alive.size(); ++j) y.set_bit(alive[j], (c >> j) & 1U);
    ones += f.eval(y) ? 1 : 0;
  }
  return {ones, total};
}

inline double cond_mean(const BooleanFunction& f, const PartialPoint& x) {
  const auto [ones, total] = count_completions(f, x);
  return static_cast<double>(ones) / static_cast<double>(total);
}

inline double derivative(const BooleanFunction& f, int i, const PartialPoint& x) {
  return (cond_mean(f, x.with(i, 1)) - cond_mean(f, x.with(i, -1))) / 2.0;
}

inline double flip_influence(const BooleanFunction& f, int i) {
  const int n = f.arity();
  std::uint64_t diff = 0;
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
    BitPoint x = BitPoint::from_index(n, k);
    const bool a = f.eval(x);
    x.flip(i);
    diff += a != f.eval(x) ? 1 : 0;
  }
  return static_cast<double>(diff) / std::ldexp(1.0, n);
}

// E[f chi_S] summed directly; chi_S(x) = prod_{i in S} x_i.
inline std::vector<double> fourier(const BooleanFunction& f) {
  const int n = f.arity();
  const std::uint64_t N = std::uint64_t{1} << n;
  std::vector<double> c(N, 0.0);
  for (std::uint64_t s = 0; s < N; ++s) {
    double acc = 0.0;
    for (std::uint64_t k = 0; k < N; ++k) {
      const BitPoint x = BitPoint::from_index(n, k);
      if (!f.eval(x)) continue;
      int chi = 1;
      for (int i = 0; i < n; ++i) {
        if ((s >> i) & 1U) chi *= x.sign(i);
      }
      acc += chi;
    }
    c[s] = acc / static_cast<double>(N);
  }
  return c;
}

inline boolrr::TruthTable random_table(int n, boolrr::Rng& rng) {
  boolrr::TruthTable t(n);
  for (std::uint64_t k = 0; k < t.size(); ++k) t.set(k, (rng() >> 63) != 0);
  return t;
}

inline PartialPoint random_partial(int n, boolrr::Rng& rng) {
  PartialPoint p(n);
  for (int i = 0; i < n; ++i) {
    const auto r = rng() % 3;
    if (r != 0) p.assign(i, r == 1 ? 1 : -1);
  }
  return p;
}

// Parity with one entry flipped: derivatives are nonzero but tiny near the root,
// so the controlled process keeps running with genuinely biased controlled steps.
inline boolrr::FunctionPtr perturbed_parity(int n, std::uint64_t flip_index) {
  boolrr::TruthTable t = boolrr::make_family("parity:n=" + std::to_string(n))->materialize();
  t.set(flip_index, !t.get(flip_index));
  return boolrr::make_table_function(t, "perturbed_parity");
}

}  // namespace oracle
