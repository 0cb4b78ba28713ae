#pragma once

// Fourier expansion f(x) = sum_S fhat(S) chi_S(x) of table-backed functions,
// influences under both normalizations, and variance.
//
// Two influence notions are exposed and never mixed:
//   flip:     P_x[f(x) != f(x with coordinate i flipped)]
//   spectral: E[(d_i f)^2] = sum_{S contains i} fhat(S)^2
// For {0,1}-valued f, flip = 4 * spectral.

#include <cstdint>
#include <vector>

#include "boolrr/function.hpp"
#include "boolrr/parallel.hpp"
#include "boolrr/truth_table.hpp"

namespace boolrr {

struct FourierCoefficients {
  int n = 0;
  std::vector<double> coeffs;  // indexed by subset mask S

  double at(std::uint64_t mask) const { return coeffs[mask]; }
  double mean() const { return coeffs[0]; }
  // sum_S fhat(S)^2.
  double weight() const;
};

FourierCoefficients wht(const TruthTable& t, Exec exec = Exec::kParallel);
// Real values sum_S fhat(S) chi_S at every vertex.
std::vector<double> inverse_wht(const FourierCoefficients& c, Exec exec = Exec::kParallel);
// Inverse transform, requiring every value to be exactly 0 or 1.
TruthTable to_table(const FourierCoefficients& c);

enum class InfluenceKind { kFlip, kSpectral };

double influence_flip(const BooleanFunction& f, int i);
// Spectral influence. Table-backed f goes through the transform; closed forms use flip / 4.
double influence_spectral(const BooleanFunction& f, int i);
double influence(const BooleanFunction& f, int i, InfluenceKind kind);
std::vector<double> influences(const BooleanFunction& f, InfluenceKind kind, Exec exec = Exec::kParallel);
double max_influence(const BooleanFunction& f, InfluenceKind kind);

double mean(const BooleanFunction& f);
// E[f^2] - E[f]^2 = mu (1 - mu) for {0,1}-valued f.
double variance(const BooleanFunction& f);

// |grad f(0)|^2 / (alpha^2 ln(e / alpha)) with alpha = f(0); the Level-1 ratio.
struct Level1Report {
  double alpha = 0.0;
  double grad_norm_sq = 0.0;
  double ratio = 0.0;
};
Level1Report level1(const BooleanFunction& f);

}  // namespace boolrr
