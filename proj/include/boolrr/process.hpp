#pragma once

// The discrete revelation processes on {-1,0,1}^n:
//   uniform      every step reveals a uniform sign,
//   conditioned  steps follow 1/2 +- d_i f / (2 f), ending uniform on f^-1(1),
//   controlled   the conditioned process written as a uniform environment z
//                plus a player who sets an eps-fraction of steps, with a
//                breaking condition after which the player controls everything.
// Entropies and divergences are in bits.

#include <cstdint>
#include <optional>
#include <vector>

#include "boolrr/bits.hpp"
#include "boolrr/function.hpp"
#include "boolrr/parallel.hpp"
#include "boolrr/rng.hpp"
#include "boolrr/stats.hpp"
#include "boolrr/truth_table.hpp"

namespace boolrr {

// Coordinate order[t-1] receives values[t-1] at step t.
struct ProcessPath {
  std::vector<int> order;
  std::vector<int> values;

  int arity() const { return static_cast<int>(order.size()); }
  // The state after t steps.
  PartialPoint state(int t) const;
  BitPoint endpoint() const { return state(arity()).to_point(); }
};

ProcessPath run_uniform(int n, Rng& rng);
ProcessPath run_uniform(const BooleanFunction& f, std::uint64_t seed);

struct StepLaw {
  double p_plus = 0.5;
  double p_minus = 0.5;
};

// Law of the next value of coordinate i under the conditioned measure at y.
// Throws DomainError if f(y) = 0 and InvariantViolation if a probability leaves [0, 1].
StepLaw step_distribution_q(const BooleanFunction& f, const PartialPoint& y, int i);

ProcessPath run_conditioned(const BooleanFunction& f, Rng& rng);
ProcessPath run_conditioned(const BooleanFunction& f, std::uint64_t seed);

// prod_{t<=s} (1 + y_{pi(t)} d_{pi(t)} f(y(t-1)) / f(y(t-1))).
double rn_product(const BooleanFunction& f, const ProcessPath& path, int s);
// |rn_product - f(y(s)) / f(0)|.
double rn_check(const BooleanFunction& f, const ProcessPath& path, int s);

// ---------------------------------------------------------------------------
// Controlled process

struct PiConfig {
  double epsilon = 0.1;
  double delta = 0.01;
  bool complement = false;   // run on 1 - f instead of f
  int m = -1;                // ledger horizon; -1 means floor((1 - eps) n)
  std::uint64_t seed = 0;
};

// Preparation stage: permutation, control times, environment signs.
// Step-indexed: pi[t-1], controlled[t-1], z[t-1] (z is 0 at controlled steps).
struct PiInputs {
  std::vector<int> pi;
  std::vector<char> controlled;
  std::vector<int> z;
};

PiInputs sample_pi_inputs(int n, double epsilon, Rng& rng);

struct KLLedgerEntry {
  int t = 0;
  bool controlled = false;
  double ratio = 0.0;    // d_{pi(t)} f(Y(t-1)) / f(Y(t-1))
  double step_kl = 0.0;  // 1 - H(1/2 + ratio / (2 eps)) on counted controlled steps
  double z = 0.0;        // ratio^2 on counted controlled steps
};

struct PiRun {
  int n = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  int m = 0;
  PiInputs inputs;
  ProcessPath y;
  ProcessPath x;
  std::vector<double> f_path;  // f(Y(t)), t = 0..n
  int tau = 0;                 // min(tau1, tau2, n + 1)
  int tau1 = 0;                // first t with max_i |d_i f(Y(t))| > eps delta, else n + 1
  int tau2 = 0;                // first t with f(Y(t)) < delta, else n + 1
  int tau_prime = 0;           // min(tau, m) + 1
  std::vector<KLLedgerEntry> ledger;  // t = 1..n
  double terminal_kl = 0.0;    // log(1 / f(Y(tau_prime - 1)))
  bool clamped = false;        // a controlled probability had to be clamped into [0, 1]
  int clamp_step = 0;
  double max_mixture_residual = 0.0;  // over unclamped Phase 1 steps
};

int default_horizon(int n, double epsilon);

// The function the process runs on: f itself or its complement.
FunctionPtr pi_target(const FunctionPtr& f, const PiConfig& cfg);

PiRun run_controlled(const BooleanFunction& f, const PiConfig& cfg, Rng& rng);
// Run with a given preparation stage; only step randomness is drawn from rng.
PiRun run_controlled(const BooleanFunction& f, const PiConfig& cfg, const PiInputs& inputs, Rng& rng);
PiRun run_controlled(const BooleanFunction& f, const PiConfig& cfg);

// Ledger entries for horizon m: steps t < min(tau, m) + 1 count.
std::vector<KLLedgerEntry> ledger_for(const PiRun& run, int m);

struct KLAudit {
  int m = 0;
  int tau_prime = 0;
  double sum_z = 0.0;
  double sum_step_kl = 0.0;
  double terminal_kl = 0.0;
  double kl_total = 0.0;         // sum_step_kl + terminal_kl
  double lambda_unit = 0.0;      // eps ln(e n / (n - m + 1)) log(e / delta)
  double z_ratio = 0.0;          // sum_z / lambda_unit
  double composite = 0.0;        // 3 lambda_unit / eps^2 + log(1 / delta)
  double max_z_over_eps_sq = 0.0;
  bool entries_ok = true;        // Z <= eps^2 and step_kl <= Z / eps^2 on every counted entry
};

KLAudit kl_ledger_audit(const PiRun& run, int m);

// E and Var of Z_t given Y(t-1) = y, over the choice of the next coordinate and whether it is controlled.
struct ZMoments {
  double mean = 0.0;
  double variance = 0.0;
  double max_ratio_sq = 0.0;
};
ZMoments z_moments(const BooleanFunction& f, const PartialPoint& y, double epsilon);

struct StoppingStats {
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  int threshold = 0;          // floor((1 - eps) n)
  Estimate p_early;           // P[tau <= (1 - eps) n]
  Estimate p_early_tau1;
  Estimate p_early_tau2;
  double bound = 0.0;         // 3 delta / f(0)
  bool holds = false;         // p_early <= bound + 3 sigma
  std::int64_t clamped_runs = 0;
  double mean_f0 = 0.0;
  // Parameter preconditions, reported only.
  double max_influence = 0.0;
  double eps_condition_lhs = 0.0;   // (16 / eps) ln(4 / eps)
  double eps_condition_rhs = 0.0;   // ln(1 / mINF)
  bool eps_condition = false;
  double delta_condition_rhs = 0.0; // mINF^{eps / 80} / eps
  bool delta_condition = false;
  Estimate mean_sum_z;
  Estimate mean_sum_step_kl;
  Estimate mean_terminal_kl;
};

StoppingStats stopping_stats(const BooleanFunction& f, const PiConfig& cfg, std::int64_t trials,
                             Exec exec = Exec::kParallel);

struct KLExact {
  double kl = 0.0;                 // sum_y P(y) log P(y) / R(y)
  double chain_rule = 0.0;         // expected_step_kl + expected_terminal
  double expected_step_kl = 0.0;
  double expected_terminal = 0.0;
  double total_probability = 0.0;
  std::int64_t endpoints = 0;
  int free_coordinates = 0;
};

inline constexpr int kMaxKLFree = 16;

// Exact divergence of the controlled endpoint from the uniform reference given the
// first m steps of the preparation stage. The permutation is fixed in full; later
// control times and environment signs are averaged over, which makes steps after m
// follow the conditioned law.
KLExact kl_exact_small_n(const BooleanFunction& f, double epsilon, double delta, const PiInputs& inputs, int m);

// 2^{-(K + H(delta)) / delta}.
double kl_to_mean(double K, double delta);

struct KLToMeanCheck {
  double gamma_f = 0.0;   // gamma(f)
  double kl = 0.0;        // KL(gamma || uniform)
  double mu = 0.0;        // uniform mean of f
  double bound = 0.0;     // kl_to_mean(kl, gamma_f)
  bool holds = true;      // vacuous when gamma_f = 0
};

// gamma is a probability vector over table indices.
KLToMeanCheck kl_to_mean_verify(const TruthTable& f, const std::vector<double>& gamma);

struct DefaultParameters {
  double epsilon = 0.0;
  double delta = 0.0;
  int m = 0;
  double variance = 0.0;
  double max_influence = 0.0;  // spectral
  double eps_condition_lhs = 0.0;
  double eps_condition_rhs = 0.0;
  bool eps_condition = false;
  double delta_condition_rhs = 0.0;
  bool delta_condition = false;
};

// eps = largest eta <= rho / 3 with eta n integral, delta = p Var[f] / 8.
DefaultParameters default_parameters(double rho, double p, const BooleanFunction& f);

}  // namespace boolrr
