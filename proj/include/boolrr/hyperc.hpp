#pragma once

// The continuous revelation process (coordinate i revealed at a uniform time
// tau_i), exact moments of a multilinear function under it, and tail
// estimates for the largest first-order derivative along the way.

#include <cstdint>
#include <vector>

#include "boolrr/bits.hpp"
#include "boolrr/function.hpp"
#include "boolrr/parallel.hpp"
#include "boolrr/process.hpp"
#include "boolrr/rng.hpp"
#include "boolrr/stats.hpp"
#include "boolrr/truth_table.hpp"

namespace boolrr {

inline constexpr int kMaxMultilinearArity = 12;

// f = sum_S c_S chi_S with dense real coefficients, n <= 12.
class MultilinearFunction {
 public:
  MultilinearFunction(int n, std::vector<double> coeffs);

  static MultilinearFunction from_table(const TruthTable& t);
  // Coefficients N(0, 1) * 2^{-|S|/2}.
  static MultilinearFunction random(int n, Rng& rng);

  int arity() const { return n_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  // Value at a partial point; alive coordinates contribute 0.
  double eval(const PartialPoint& x) const;
  // d_i f at x (does not depend on x_i).
  double derivative(int i, const PartialPoint& x) const;
  // Values at every y in {-1,1}^R, indexed by the compressed bits of y over R.
  std::vector<double> values_on(std::uint64_t revealed) const;
  // max over [-1,1]^n, attained at a vertex.
  double sup_norm() const;
  // sum_{S contains i} c_S^2.
  double influence(int i) const;

 private:
  int n_;
  std::vector<double> coeffs_;
};

// E|f(X(t))|^p under independent reveals with probability t. Caches the
// per-revealed-set values so many (t, p) pairs are cheap.
class MomentOracle {
 public:
  explicit MomentOracle(const MultilinearFunction& f);
  double moment(double t, double p) const;

 private:
  int n_;
  // values_[k] holds every value over revealed sets of size k, scaled by 2^{-k}.
  std::vector<std::vector<double>> values_;
};

double exact_moment(const MultilinearFunction& f, double t, double p);

struct HcCheck {
  double t = 0.0;
  double T = 0.0;
  double lhs = 0.0;     // (E|f(X(t))|^{2+eps})^{1/(2+eps)}, eps = T - t
  double rhs = 0.0;     // (E f(X(T))^2)^{1/2}
  double margin = 0.0;  // rhs - lhs
};

HcCheck hc_check(const MultilinearFunction& f, double t, double T);
HcCheck hc_check(const MomentOracle& oracle, double t, double T);

// Smallest margin over the grid {0, step, ..., 1}^2 with t <= T.
HcCheck hc_grid_min(const MultilinearFunction& f, double step);

struct GradientBoundCheck {
  double t = 0.0;
  double grad_norm_sq = 0.0;       // E|grad f(X(t))|^2 by enumeration
  double grad_norm_sq_series = 0.0;  // sum_S |S| c_S^2 t^{|S|-1}
  double sup_norm = 0.0;
  double grad_bound = 0.0;         // sup_norm^2 / (1 - t)
  double grad_slack = 0.0;
  std::vector<double> coord_expect;  // E[d_i f(X(t))^2]
  std::vector<double> coord_bound;   // INF_i
  double coord_slack = 0.0;          // min_i (INF_i - E[d_i f(X(t))^2])
};

GradientBoundCheck gradient_bound_check(const MultilinearFunction& f, double t);

// Reveal times and values of the continuous process.
struct RevealPath {
  std::vector<double> taus;
  BitPoint x;

  int arity() const { return x.arity(); }
  PartialPoint state(double t) const;
  // Coordinates in order of reveal time.
  std::vector<int> order() const;
};

RevealPath sample_reveal_path(int n, Rng& rng);

struct CoupledPath {
  ProcessPath discrete;
  int revealed = 0;           // |S(1 - eps/2)|
  bool short_event = false;   // revealed < (1 - eps) n
};

CoupledPath couple_to_discrete(const RevealPath& path, double epsilon);

struct CouplingStats {
  double epsilon = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  Estimate p_short;
  double bound = 0.0;  // exp(-eps n / 8)
  bool holds = false;
  Estimate endpoint_mean;  // f at the discrete endpoint
  double f0 = 0.0;
  bool orders_agree = true;
};

CouplingStats coupling_stats(const BooleanFunction& f, double epsilon, std::int64_t trials, std::uint64_t seed,
                             Exec exec = Exec::kParallel);

struct BetaTailResult {
  double t = 0.0;        // continuous horizon, or 1 - eps/2 for the discrete clock
  double epsilon = 0.0;  // discrete clock only
  double theta = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double max_influence = 0.0;  // spectral
  Estimate tail;               // P[sup beta >= theta], beta over all coordinates
  Estimate tail_star;          // same for the alive-only maximum
  double bound = 0.0;
  bool holds = false;          // tail <= bound + 3 sigma
  bool precondition = false;
  double precondition_lhs = 0.0;
  double precondition_rhs = 0.0;
  double sharp_bound = 0.0;        // mINF^{(1-t)/40}, diagnostic
  bool sharp_applicable = false;   // theta >= mINF^{(1-t)/30}
  std::int64_t star_exceeds_beta = 0;  // pointwise violations of beta* <= beta
};

// Continuous clock: bound theta^-3 mINF^{(1-t)/8}.
BetaTailResult beta_tail(const BooleanFunction& f, double t, double theta, std::int64_t trials, std::uint64_t seed,
                         Exec exec = Exec::kParallel);
// Discrete clock up to floor((1 - eps) n) steps: bound theta^-3 mINF^{eps/16} + exp(-eps n / 8).
BetaTailResult discrete_beta_tail(const BooleanFunction& f, double epsilon, double theta, std::int64_t trials,
                                  std::uint64_t seed, Exec exec = Exec::kParallel);

}  // namespace boolrr
