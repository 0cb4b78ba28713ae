#include "boolrr/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "boolrr/kernels.hpp"

namespace boolrr {

double FourierCoefficients::weight() const {
  double s = 0.0;
  for (double c : coeffs) s += c * c;
  return s;
}

FourierCoefficients wht(const TruthTable& t, Exec exec) {
  FourierCoefficients out;
  out.n = t.arity();
  out.coeffs = t.as_reals();
  if (exec == Exec::kSerial) {
    kernels::wht_serial(out.coeffs);
  } else {
    kernels::wht_parallel(out.coeffs);
  }
  // Partial sums are integers below 2^53, so the scaling is exact.
  for (double& c : out.coeffs) c = std::ldexp(c, -out.n);
  return out;
}

std::vector<double> inverse_wht(const FourierCoefficients& c, Exec exec) {
  std::vector<double> values = c.coeffs;
  if (exec == Exec::kSerial) {
    kernels::wht_serial(values);
  } else {
    kernels::wht_parallel(values);
  }
  return values;
}

TruthTable to_table(const FourierCoefficients& c) {
  const std::vector<double> values = inverse_wht(c);
  TruthTable t(c.n);
  for (std::uint64_t k = 0; k < values.size(); ++k) {
    if (values[k] == 1.0) {
      t.set(k, true);
    } else if (values[k] != 0.0) {
      throw std::domain_error("to_table: inverse transform is not {0,1}-valued");
    }
  }
  return t;
}

double influence_flip(const BooleanFunction& f, int i) {
  if (i < 0 || i >= f.arity()) throw std::out_of_range("influence: coordinate out of range");
  return f.influence_flip(i);
}

double influence_spectral(const BooleanFunction& f, int i) {
  if (i < 0 || i >= f.arity()) throw std::out_of_range("influence: coordinate out of range");
  if (const TruthTable* t = f.table()) {
    const FourierCoefficients c = wht(*t);
    double s = 0.0;
    for (std::uint64_t m = 0; m < c.coeffs.size(); ++m) {
      if ((m >> i) & 1U) s += c.coeffs[m] * c.coeffs[m];
    }
    return s;
  }
  return f.influence_flip(i) / 4.0;
}

double influence(const BooleanFunction& f, int i, InfluenceKind kind) {
  return kind == InfluenceKind::kFlip ? influence_flip(f, i) : influence_spectral(f, i);
}

std::vector<double> influences(const BooleanFunction& f, InfluenceKind kind, Exec exec) {
  const int n = f.arity();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (const TruthTable* t = f.table()) {
    if (kind == InfluenceKind::kFlip) {
      const auto counts = exec == Exec::kSerial ? kernels::flip_counts_serial(*t) : kernels::flip_counts_parallel(*t);
      for (int i = 0; i < n; ++i) out[i] = std::ldexp(static_cast<double>(counts[i]), -n);
    } else {
      const FourierCoefficients c = wht(*t, exec);
      out = exec == Exec::kSerial ? kernels::spectral_weights_serial(c.coeffs, n)
                                  : kernels::spectral_weights_parallel(c.coeffs, n);
    }
    return out;
  }
  for (int i = 0; i < n; ++i) out[i] = influence(f, i, kind);
  return out;
}

double max_influence(const BooleanFunction& f, InfluenceKind kind) {
  const auto inf = influences(f, kind);
  return inf.empty() ? 0.0 : *std::max_element(inf.begin(), inf.end());
}

double mean(const BooleanFunction& f) { return f.mean(); }

double variance(const BooleanFunction& f) {
  const double m = f.mean();
  return m * (1.0 - m);
}

Level1Report level1(const BooleanFunction& f) {
  Level1Report r;
  const PartialPoint zero(f.arity());
  r.alpha = f.cond_mean(zero);
  r.grad_norm_sq = f.gradient(zero).norm_sq();
  if (r.alpha > 0.0) {
    r.ratio = r.grad_norm_sq / (r.alpha * r.alpha * std::log(std::exp(1.0) / r.alpha));
  } else {
    r.ratio = 0.0;
  }
  return r;
}

}  // namespace boolrr
