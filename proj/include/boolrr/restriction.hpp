#pragma once

// Random restrictions (S, y): samplers, restricted functions, and scans of
// how often the restricted function is constant.

#include <cstdint>
#include <string>
#include <vector>

#include "boolrr/bits.hpp"
#include "boolrr/function.hpp"
#include "boolrr/parallel.hpp"
#include "boolrr/rng.hpp"
#include "boolrr/stats.hpp"

namespace boolrr {

// Fixed coordinates and their signs, stored as a partial point.
struct Restriction {
  PartialPoint point;

  int arity() const { return point.arity(); }
  int fixed_count() const { return point.fixed_count(); }
  int alive_count() const { return point.alive_count(); }
  std::vector<int> alive_indices() const { return point.alive_indices(); }
};

// Exactly k_alive coordinates alive, chosen uniformly; uniform signs on the rest.
Restriction sample_fixed_alive(int n, int k_alive, Rng& rng);
// Each coordinate fixed independently with probability p_fix; uniform signs.
Restriction sample_independent(int n, double p_fix, Rng& rng);

// R2 lives on the alive coordinates of R1 (ascending order). Returns the combined restriction on [n].
Restriction compose(const Restriction& r1, const Restriction& r2);

// f restricted to R, as a function of the alive coordinates in ascending original order.
// Table-backed f gives a materialized table; closed forms are wrapped.
FunctionPtr restrict(const FunctionPtr& f, const Restriction& r);

// Wrapper threading fixed signs of a restriction through a parent function.
class RestrictedFunction final : public BooleanFunction {
 public:
  RestrictedFunction(FunctionPtr parent, Restriction r);

  int arity() const override { return static_cast<int>(alive_.size()); }
  bool eval(const BitPoint& x) const override;
  double cond_mean(const PartialPoint& x) const override;
  double derivative_at(int i, const PartialPoint& x) const override;
  Constancy constancy(const PartialPoint& x) const override;
  std::optional<bool> known_monotone() const override { return parent_->known_monotone(); }
  std::string describe() const override { return parent_->describe() + "|restricted"; }

  // The parent's point corresponding to x on the alive coordinates.
  PartialPoint lift(const PartialPoint& x) const;

 private:
  FunctionPtr parent_;
  Restriction r_;
  std::vector<int> alive_;
};

enum class ScanMode { kFixed, kIndependent };

struct ScanResult {
  double rho = 0.0;
  ScanMode mode = ScanMode::kFixed;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  int alive_count = 0;            // fixed mode only
  Estimate p_constant;            // P[Var[f|R] = 0]
  Estimate p_constant_one;        // P[f|R = 1]
  Estimate mean_restricted;       // E[mean of f|R], equals f(0) in expectation
  double var_min = 0.0, var_q05 = 0.0, var_q50 = 0.0, var_q95 = 0.0;
};

// Alive count used in fixed mode: ceil(rho n).
int alive_for_rho(int n, double rho);

// For each rho: fixed mode keeps ceil(rho n) coordinates alive, independent mode
// keeps each alive with probability rho. Trial j at grid slot g draws from its own stream.
std::vector<ScanResult> scan(const BooleanFunction& f, const std::vector<double>& rho_grid,
                             std::int64_t trials, std::uint64_t seed, ScanMode mode,
                             Exec exec = Exec::kParallel);

// P[tribes|R = 1] when each variable stays alive with probability 1/w:
// (1 - (1/2 + 1/(2w))^w)^{n/w}.
double tribes_survival_formula(int w, int n);

}  // namespace boolrr
