#include "boolrr/process.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "boolrr/errors.hpp"
#include "boolrr/fourier.hpp"
#include "boolrr/info.hpp"

namespace boolrr {

namespace {

constexpr double kProbSlack = 1e-12;

int draw_sign(Rng& rng, double p_plus) { return bernoulli(rng, p_plus) ? 1 : -1; }

void check_probability(double p, const char* what) {
  if (!(p >= -kProbSlack && p <= 1.0 + kProbSlack)) {
    throw InvariantViolation(std::string(what) + ": step probability " + std::to_string(p) + " outside [0, 1]");
  }
}

}  // namespace

PartialPoint ProcessPath::state(int t) const {
  if (t < 0 || t > arity()) throw std::out_of_range("ProcessPath::state: time outside [0, n]");
  PartialPoint p(arity());
  for (int s = 0; s < t; ++s) p.fix(order[static_cast<std::size_t>(s)], values[static_cast<std::size_t>(s)]);
  return p;
}

ProcessPath run_uniform(int n, Rng& rng) {
  ProcessPath path;
  path.order = random_permutation(n, rng);
  path.values.resize(static_cast<std::size_t>(n));
  for (auto& v : path.values) v = random_sign(rng);
  return path;
}

ProcessPath run_uniform(const BooleanFunction& f, std::uint64_t seed) {
  Rng rng = make_stream(seed, {0x756e6966ULL});
  return run_uniform(f.arity(), rng);
}

StepLaw step_distribution_q(const BooleanFunction& f, const PartialPoint& y, int i) {
  require_same_arity(f.arity(), y.arity(), "step_distribution_q");
  if (y.is_fixed(i)) throw std::logic_error("step_distribution_q: coordinate already fixed");
  const double fy = f.cond_mean(y);
  if (!(fy > 0.0)) throw DomainError("step_distribution_q: f(y) = 0, conditioned step undefined");
  const double d = f.derivative_at(i, y);
  const double p = 0.5 + d / (2.0 * fy);
  check_probability(p, "step_distribution_q");
  const double pc = std::clamp(p, 0.0, 1.0);
  return {pc, 1.0 - pc};
}

ProcessPath run_conditioned(const BooleanFunction& f, Rng& rng) {
  const int n = f.arity();
  if (!(f.mean() > 0.0)) throw DomainError("run_conditioned: f is identically 0");
  ProcessPath path;
  path.order = random_permutation(n, rng);
  path.values.resize(static_cast<std::size_t>(n));
  PartialPoint y(n);
  for (int t = 0; t < n; ++t) {
    const int i = path.order[static_cast<std::size_t>(t)];
    const int v = draw_sign(rng, step_distribution_q(f, y, i).p_plus);
    path.values[static_cast<std::size_t>(t)] = v;
    y.fix(i, v);
  }
  return path;
}

ProcessPath run_conditioned(const BooleanFunction& f, std::uint64_t seed) {
  Rng rng = make_stream(seed, {0x636f6e64ULL});
  return run_conditioned(f, rng);
}

double rn_product(const BooleanFunction& f, const ProcessPath& path, int s) {
  require_same_arity(f.arity(), path.arity(), "rn_product");
  PartialPoint y(path.arity());
  double prod = 1.0;
  for (int t = 0; t < s; ++t) {
    const int i = path.order[static_cast<std::size_t>(t)];
    const int v = path.values[static_cast<std::size_t>(t)];
    prod *= 1.0 + v * f.derivative_at(i, y) / f.cond_mean(y);
    y.fix(i, v);
  }
  return prod;
}

double rn_check(const BooleanFunction& f, const ProcessPath& path, int s) {
  const double target = f.cond_mean(path.state(s)) / f.mean();
  return std::abs(rn_product(f, path, s) - target);
}

// ---------------------------------------------------------------------------

PiInputs sample_pi_inputs(int n, double epsilon, Rng& rng) {
  PiInputs in;
  in.pi = random_permutation(n, rng);
  in.controlled.resize(static_cast<std::size_t>(n));
  in.z.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    const bool c = bernoulli(rng, epsilon);
    const int s = random_sign(rng);
    in.controlled[static_cast<std::size_t>(t)] = c;
    in.z[static_cast<std::size_t>(t)] = c ? 0 : s;
  }
  return in;
}

int default_horizon(int n, double epsilon) {
  return static_cast<int>(std::floor((1.0 - epsilon) * n + 1e-9));
}

FunctionPtr pi_target(const FunctionPtr& f, const PiConfig& cfg) {
  return cfg.complement ? make_complement(f) : f;
}

namespace {

void validate_pi(const BooleanFunction& f, double epsilon, double delta) {
  const int n = f.arity();
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("controlled process: epsilon must lie in (0, 1)");
  const double en = epsilon * n;
  if (std::abs(en - std::round(en)) > 1e-9) throw std::invalid_argument("controlled process: epsilon * n must be an integer");
  if (!(delta > 0.0)) throw std::invalid_argument("controlled process: delta must be positive");
  const double f0 = f.mean();
  if (!(f0 > 0.0)) throw DomainError("controlled process: f is identically 0");
  if (delta > f0) throw std::invalid_argument("controlled process: delta exceeds f(0)");
}

struct BreakFlags {
  bool derivative = false;
  bool mean = false;
  bool any() const { return derivative || mean; }
};

BreakFlags breaking(const BooleanFunction& f, const PartialPoint& y, double fy, double epsilon, double delta) {
  BreakFlags b;
  b.mean = fy < delta;
  b.derivative = f.max_abs_derivative(y, /*alive_only=*/false) > epsilon * delta;
  return b;
}

}  // namespace

PiRun run_controlled(const BooleanFunction& f, const PiConfig& cfg, const PiInputs& inputs, Rng& rng) {
  validate_pi(f, cfg.epsilon, cfg.delta);
  const int n = f.arity();
  if (static_cast<int>(inputs.pi.size()) != n || static_cast<int>(inputs.controlled.size()) != n ||
      static_cast<int>(inputs.z.size()) != n) {
    throw ArityError("run_controlled: preparation stage does not match arity");
  }
  const double eps = cfg.epsilon;
  PiRun run;
  run.n = n;
  run.epsilon = eps;
  run.delta = cfg.delta;
  run.m = cfg.m < 0 ? default_horizon(n, eps) : cfg.m;
  if (run.m < 0 || run.m > n) throw std::out_of_range("run_controlled: m outside [0, n]");
  run.inputs = inputs;
  run.y.order = inputs.pi;
  run.x.order = inputs.pi;
  run.y.values.resize(static_cast<std::size_t>(n));
  run.x.values.resize(static_cast<std::size_t>(n));
  run.f_path.resize(static_cast<std::size_t>(n) + 1);
  run.ledger.resize(static_cast<std::size_t>(n));
  run.tau1 = run.tau2 = n + 1;

  PartialPoint y(n);
  double fy = f.mean();
  run.f_path[0] = fy;
  auto record_break = [&](int t) {
    if (run.tau1 <= n && run.tau2 <= n) return;
    const BreakFlags b = breaking(f, y, fy, eps, cfg.delta);
    if (b.derivative && run.tau1 > n) run.tau1 = t;
    if (b.mean && run.tau2 > n) run.tau2 = t;
  };
  record_break(0);
  bool phase1 = std::min(run.tau1, run.tau2) > 0;

  for (int t = 1; t <= n; ++t) {
    const auto u = static_cast<std::size_t>(t - 1);
    const int i = inputs.pi[u];
    const bool controlled = inputs.controlled[u] != 0;
    const double ratio = f.derivative_at(i, y) / fy;
    run.ledger[u] = KLLedgerEntry{t, controlled, ratio, 0.0, 0.0};
    int v = 0;
    int xv = 0;
    if (phase1) {
      const double mixture = (1.0 - eps) * 0.5 + eps * (0.5 + ratio / (2.0 * eps));
      if (controlled) {
        double p = 0.5 + ratio / (2.0 * eps);
        if (p < -kProbSlack || p > 1.0 + kProbSlack) {
          if (!run.clamped) run.clamp_step = t;
          run.clamped = true;
        } else {
          run.max_mixture_residual = std::max(run.max_mixture_residual, std::abs(mixture - (0.5 + ratio / 2.0)));
        }
        p = std::clamp(p, 0.0, 1.0);
        v = draw_sign(rng, p);
        xv = random_sign(rng);
      } else {
        run.max_mixture_residual = std::max(run.max_mixture_residual, std::abs(mixture - (0.5 + ratio / 2.0)));
        v = inputs.z[u];
        xv = v;
      }
    } else {
      v = draw_sign(rng, step_distribution_q(f, y, i).p_plus);
      xv = random_sign(rng);
    }
    run.y.values[u] = v;
    run.x.values[u] = xv;
    y.fix(i, v);
    fy = f.cond_mean(y);
    run.f_path[static_cast<std::size_t>(t)] = fy;
    record_break(t);
    if (phase1 && std::min(run.tau1, run.tau2) <= t) phase1 = false;
  }
  run.tau = std::min({run.tau1, run.tau2, n + 1});
  run.tau_prime = std::min(run.tau, run.m) + 1;
  run.ledger = ledger_for(run, run.m);
  run.terminal_kl = std::log2(1.0 / run.f_path[static_cast<std::size_t>(run.tau_prime - 1)]);
  return run;
}

PiRun run_controlled(const BooleanFunction& f, const PiConfig& cfg, Rng& rng) {
  const PiInputs in = sample_pi_inputs(f.arity(), cfg.epsilon, rng);
  return run_controlled(f, cfg, in, rng);
}

PiRun run_controlled(const BooleanFunction& f, const PiConfig& cfg) {
  Rng rng = make_stream(cfg.seed, {0x70692d72ULL});
  return run_controlled(f, cfg, rng);
}

std::vector<KLLedgerEntry> ledger_for(const PiRun& run, int m) {
  if (m < 0 || m > run.n) throw std::out_of_range("ledger_for: m outside [0, n]");
  const int tau_prime = std::min(run.tau, m) + 1;
  std::vector<KLLedgerEntry> out = run.ledger;
  for (auto& e : out) {
    e.z = 0.0;
    e.step_kl = 0.0;
    if (e.controlled && e.t < tau_prime) {
      e.z = e.ratio * e.ratio;
      e.step_kl = kl_vs_fair_coin(0.5 + e.ratio / (2.0 * run.epsilon));
    }
  }
  return out;
}

KLAudit kl_ledger_audit(const PiRun& run, int m) {
  KLAudit a;
  a.m = m;
  a.tau_prime = std::min(run.tau, m) + 1;
  const double eps2 = run.epsilon * run.epsilon;
  for (const auto& e : ledger_for(run, m)) {
    a.sum_z += e.z;
    a.sum_step_kl += e.step_kl;
    a.max_z_over_eps_sq = std::max(a.max_z_over_eps_sq, e.z / eps2);
    if (e.z > eps2 * (1.0 + 1e-12) || e.step_kl > e.z / eps2 + 1e-12) a.entries_ok = false;
  }
  a.terminal_kl = std::log2(1.0 / run.f_path[static_cast<std::size_t>(a.tau_prime - 1)]);
  a.kl_total = a.sum_step_kl + a.terminal_kl;
  const double n = run.n;
  a.lambda_unit = run.epsilon * std::log(std::exp(1.0) * n / (n - m + 1.0)) * std::log2(std::exp(1.0) / run.delta);
  a.z_ratio = a.lambda_unit > 0.0 ? a.sum_z / a.lambda_unit : 0.0;
  a.composite = 3.0 * a.lambda_unit / eps2 + std::log2(1.0 / run.delta);
  return a;
}

ZMoments z_moments(const BooleanFunction& f, const PartialPoint& y, double epsilon) {
  const std::vector<int> alive = y.alive_indices();
  ZMoments zm;
  if (alive.empty()) return zm;
  const double fy = f.cond_mean(y);
  if (!(fy > 0.0)) throw DomainError("z_moments: f(y) = 0");
  double s2 = 0.0, s4 = 0.0;
  for (int i : alive) {
    const double r = f.derivative_at(i, y) / fy;
    s2 += r * r;
    s4 += r * r * r * r;
    zm.max_ratio_sq = std::max(zm.max_ratio_sq, r * r);
  }
  const double k = static_cast<double>(alive.size());
  zm.mean = epsilon * s2 / k;
  zm.variance = epsilon * s4 / k - zm.mean * zm.mean;
  return zm;
}

// ---------------------------------------------------------------------------

StoppingStats stopping_stats(const BooleanFunction& f, const PiConfig& cfg, std::int64_t trials, Exec exec) {
  if (trials < 1) throw std::invalid_argument("stopping_stats: trials must be >= 1");
  const double f0 = f.mean();
  if (f0 <= 0.0 || f0 >= 1.0) throw DomainError("stopping_stats: f is constant");
  validate_pi(f, cfg.epsilon, cfg.delta);
  const int n = f.arity();
  StoppingStats st;
  st.trials = trials;
  st.seed = cfg.seed;
  st.epsilon = cfg.epsilon;
  st.delta = cfg.delta;
  st.threshold = default_horizon(n, cfg.epsilon);
  st.mean_f0 = f0;
  st.bound = 3.0 * cfg.delta / f0;

  const auto count = static_cast<std::size_t>(trials);
  std::vector<char> early(count), early1(count), early2(count), clamped(count);
  std::vector<double> sum_z(count), sum_kl(count), term(count);
  for_each_index(exec, trials, [&](std::int64_t j) {
    Rng rng = make_stream(cfg.seed, {0x73746f70ULL, static_cast<std::uint64_t>(j)});
    const PiRun run = run_controlled(f, cfg, rng);
    const auto u = static_cast<std::size_t>(j);
    early[u] = run.tau <= st.threshold;
    early1[u] = run.tau1 <= st.threshold;
    early2[u] = run.tau2 <= st.threshold;
    clamped[u] = run.clamped;
    const KLAudit a = kl_ledger_audit(run, run.m);
    sum_z[u] = a.sum_z;
    sum_kl[u] = a.sum_step_kl;
    term[u] = a.terminal_kl;
  });
  std::int64_t e = 0, e1 = 0, e2 = 0;
  for (std::size_t u = 0; u < count; ++u) {
    e += early[u];
    e1 += early1[u];
    e2 += early2[u];
    st.clamped_runs += clamped[u];
  }
  st.p_early = proportion(e, trials);
  st.p_early_tau1 = proportion(e1, trials);
  st.p_early_tau2 = proportion(e2, trials);
  st.holds = st.p_early.at_most(st.bound);
  st.mean_sum_z = sample_mean(sum_z);
  st.mean_sum_step_kl = sample_mean(sum_kl);
  st.mean_terminal_kl = sample_mean(term);

  st.max_influence = max_influence(f, InfluenceKind::kSpectral);
  st.eps_condition_lhs = 16.0 / cfg.epsilon * std::log(4.0 / cfg.epsilon);
  st.eps_condition_rhs = st.max_influence > 0.0 ? std::log(1.0 / st.max_influence) : INFINITY;
  st.eps_condition = st.eps_condition_lhs <= st.eps_condition_rhs;
  st.delta_condition_rhs = std::pow(st.max_influence, cfg.epsilon / 80.0) / cfg.epsilon;
  st.delta_condition = cfg.delta >= st.delta_condition_rhs;
  return st;
}

// ---------------------------------------------------------------------------

KLExact kl_exact_small_n(const BooleanFunction& f, double epsilon, double delta, const PiInputs& inputs, int m) {
  validate_pi(f, epsilon, delta);
  const int n = f.arity();
  if (static_cast<int>(inputs.pi.size()) != n || static_cast<int>(inputs.controlled.size()) != n ||
      static_cast<int>(inputs.z.size()) != n) {
    throw ArityError("kl_exact_small_n: preparation stage does not match arity");
  }
  if (m < 0 || m > n) throw std::out_of_range("kl_exact_small_n: m outside [0, n]");
  KLExact out;
  for (int t = 1; t <= m; ++t) out.free_coordinates += inputs.controlled[static_cast<std::size_t>(t - 1)] ? 1 : 0;
  out.free_coordinates += n - m;
  if (out.free_coordinates > kMaxKLFree) throw std::length_error("kl_exact_small_n: more than 16 free coordinates");

  std::vector<double> f_hist(static_cast<std::size_t>(n) + 1);
  PartialPoint y(n);
  f_hist[0] = f.mean();
  const bool broken0 = breaking(f, y, f_hist[0], epsilon, delta).any();

  // tau is n + 1 until the break; only breaks at t <= m matter for the horizon.
  std::function<void(int, double, double, double, bool, int)> dfs =
      [&](int t, double p, double r, double step_kl, bool phase1, int tau) {
        if (t > n) {
          const int h = std::min(tau, m);
          const double terminal = std::log2(1.0 / f_hist[static_cast<std::size_t>(h)]);
          out.kl += p * std::log2(p / r);
          out.expected_step_kl += p * step_kl;
          out.expected_terminal += p * terminal;
          out.total_probability += p;
          ++out.endpoints;
          return;
        }
        const auto u = static_cast<std::size_t>(t - 1);
        const int i = inputs.pi[u];
        const double fy = f_hist[u];
        const double d = f.derivative_at(i, y);
        const bool in_prefix = t <= m;
        auto step = [&](int v, double pv, double rv, double kl_add) {
          if (pv <= 0.0) return;
          y.fix(i, v);
          const double fv = f.cond_mean(y);
          f_hist[static_cast<std::size_t>(t)] = fv;
          bool still = phase1 && in_prefix;
          int tau_next = tau;
          if (still && breaking(f, y, fv, epsilon, delta).any()) {
            still = false;
            tau_next = t;
          }
          dfs(t + 1, p * pv, r * rv, step_kl + kl_add, still, tau_next);
          y.release(i);
        };
        if (in_prefix && phase1 && !inputs.controlled[u]) {
          step(inputs.z[u], 1.0, 1.0, 0.0);
        } else if (in_prefix && phase1) {
          const double pp = 0.5 + d / (2.0 * epsilon * fy);
          check_probability(pp, "kl_exact_small_n");
          const double pc = std::clamp(pp, 0.0, 1.0);
          const double k = kl_vs_fair_coin(pc);
          step(1, pc, 0.5, k);
          step(-1, 1.0 - pc, 0.5, k);
        } else {
          const double pq = std::clamp(0.5 + d / (2.0 * fy), 0.0, 1.0);
          step(1, pq, 0.5, 0.0);
          step(-1, 1.0 - pq, 0.5, 0.0);
        }
      };
  dfs(1, 1.0, 1.0, 0.0, !broken0 && m > 0, broken0 ? 0 : n + 1);
  out.chain_rule = out.expected_step_kl + out.expected_terminal;
  return out;
}

// ---------------------------------------------------------------------------

double kl_to_mean(double K, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("kl_to_mean: delta must lie in (0, 1]");
  if (K < 0.0) throw std::invalid_argument("kl_to_mean: K must be nonnegative");
  return std::exp2(-(K + binary_entropy(delta)) / delta);
}

KLToMeanCheck kl_to_mean_verify(const TruthTable& f, const std::vector<double>& gamma) {
  if (gamma.size() != f.size()) throw ArityError("kl_to_mean_verify: distribution size does not match table");
  KLToMeanCheck c;
  const std::vector<double> uniform(gamma.size(), std::ldexp(1.0, -f.arity()));
  for (std::uint64_t k = 0; k < f.size(); ++k) {
    if (f.get(k)) c.gamma_f += gamma[k];
  }
  c.kl = std::max(0.0, kl_divergence(gamma, uniform));
  c.mu = f.mean();
  if (c.gamma_f <= 0.0) return c;
  c.bound = kl_to_mean(c.kl, std::min(c.gamma_f, 1.0));
  c.holds = c.mu >= c.bound * (1.0 - 1e-12);
  return c;
}

DefaultParameters default_parameters(double rho, double p, const BooleanFunction& f) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("default_parameters: rho must lie in (0, 1]");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("default_parameters: p must lie in (0, 1]");
  const int n = f.arity();
  const int k = static_cast<int>(std::floor(rho * n / 3.0 + 1e-9));
  if (k < 1) throw DomainError("default_parameters: no valid epsilon (rho < 3/n)");
  DefaultParameters d;
  d.epsilon = static_cast<double>(k) / n;
  d.m = n - k;
  d.variance = variance(f);
  d.delta = p * d.variance / 8.0;
  d.max_influence = max_influence(f, InfluenceKind::kSpectral);
  d.eps_condition_lhs = 16.0 / d.epsilon * std::log(4.0 / d.epsilon);
  d.eps_condition_rhs = d.max_influence > 0.0 ? std::log(1.0 / d.max_influence) : INFINITY;
  d.eps_condition = d.eps_condition_lhs <= d.eps_condition_rhs;
  d.delta_condition_rhs = std::pow(d.max_influence, d.epsilon / 80.0) / d.epsilon;
  d.delta_condition = d.delta >= d.delta_condition_rhs;
  return d;
}

}  // namespace boolrr
