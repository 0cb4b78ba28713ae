#include "boolrr/hyperc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "boolrr/fourier.hpp"
#include "boolrr/kernels.hpp"

namespace boolrr {

namespace {

// Spread the low popcount(mask) bits of j onto the set bits of mask.
std::uint64_t expand(std::uint64_t j, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (std::uint64_t m = mask; m != 0 && j != 0; m &= m - 1, j >>= 1) {
    if (j & 1U) out |= m & -m;
  }
  return out;
}

int parity_sign(std::uint64_t v) { return (std::popcount(v) & 1) ? -1 : 1; }

double reveal_weight(double t, int n, int k) { return std::pow(t, k) * std::pow(1.0 - t, n - k); }

}  // namespace

MultilinearFunction::MultilinearFunction(int n, std::vector<double> coeffs) : n_(n), coeffs_(std::move(coeffs)) {
  if (n < 0 || n > kMaxMultilinearArity) throw std::length_error("MultilinearFunction: arity above cap of 12");
  if (coeffs_.size() != (std::size_t{1} << n)) throw std::invalid_argument("MultilinearFunction: need 2^n coefficients");
}

MultilinearFunction MultilinearFunction::from_table(const TruthTable& t) {
  return MultilinearFunction(t.arity(), wht(t, Exec::kSerial).coeffs);
}

MultilinearFunction MultilinearFunction::random(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> c(std::size_t{1} << n);
  for (std::size_t s = 0; s < c.size(); ++s) c[s] = normal(rng) * std::exp2(-0.5 * std::popcount(s));
  return MultilinearFunction(n, std::move(c));
}

double MultilinearFunction::eval(const PartialPoint& x) const {
  require_same_arity(n_, x.arity(), "MultilinearFunction::eval");
  const std::uint64_t fixed = x.fixed_mask();
  const std::uint64_t signs = x.sign_mask();
  double s = 0.0;
  std::uint64_t sub = 0;
  do {
    s += coeffs_[sub] * parity_sign(sub & signs);
    sub = (sub - fixed) & fixed;
  } while (sub != 0);
  return s;
}

double MultilinearFunction::derivative(int i, const PartialPoint& x) const {
  require_same_arity(n_, x.arity(), "MultilinearFunction::derivative");
  const std::uint64_t bit = std::uint64_t{1} << i;
  const std::uint64_t fixed = x.fixed_mask() & ~bit;
  const std::uint64_t signs = x.sign_mask();
  double s = 0.0;
  std::uint64_t sub = 0;
  do {
    s += coeffs_[sub | bit] * parity_sign(sub & signs);
    sub = (sub - fixed) & fixed;
  } while (sub != 0);
  return s;
}

std::vector<double> MultilinearFunction::values_on(std::uint64_t revealed) const {
  const int k = std::popcount(revealed);
  std::vector<double> a(std::size_t{1} << k);
  for (std::uint64_t j = 0; j < a.size(); ++j) a[j] = coeffs_[expand(j, revealed)];
  kernels::wht_serial(a);
  return a;
}

double MultilinearFunction::sup_norm() const {
  const std::uint64_t all = (std::uint64_t{1} << n_) - 1;
  double m = 0.0;
  for (double v : values_on(all)) m = std::max(m, std::abs(v));
  return m;
}

double MultilinearFunction::influence(int i) const {
  const std::uint64_t bit = std::uint64_t{1} << i;
  double s = 0.0;
  for (std::uint64_t S = 0; S < coeffs_.size(); ++S) {
    if (S & bit) s += coeffs_[S] * coeffs_[S];
  }
  return s;
}

// ---------------------------------------------------------------------------

MomentOracle::MomentOracle(const MultilinearFunction& f) : n_(f.arity()), values_(static_cast<std::size_t>(f.arity()) + 1) {
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << n_); ++r) {
    auto& bucket = values_[static_cast<std::size_t>(std::popcount(r))];
    for (double v : f.values_on(r)) bucket.push_back(std::abs(v));
  }
}

double MomentOracle::moment(double t, double p) const {
  if (!(t >= 0.0 && t <= 1.0)) throw std::out_of_range("moment: t outside [0, 1]");
  if (!(p >= 1.0)) throw std::out_of_range("moment: p must be >= 1");
  double total = 0.0;
  for (int k = 0; k <= n_; ++k) {
    const double w = reveal_weight(t, n_, k);
    if (w == 0.0) continue;
    double s = 0.0;
    for (double v : values_[static_cast<std::size_t>(k)]) s += std::pow(v, p);
    total += w * std::ldexp(s, -k);
  }
  return total;
}

double exact_moment(const MultilinearFunction& f, double t, double p) { return MomentOracle(f).moment(t, p); }

HcCheck hc_check(const MomentOracle& oracle, double t, double T) {
  if (!(t >= 0.0 && t <= T && T <= 1.0)) throw std::out_of_range("hc_check: need 0 <= t <= T <= 1");
  HcCheck c;
  c.t = t;
  c.T = T;
  const double p = 2.0 + (T - t);
  c.lhs = std::pow(oracle.moment(t, p), 1.0 / p);
  c.rhs = std::sqrt(oracle.moment(T, 2.0));
  c.margin = c.rhs - c.lhs;
  return c;
}

HcCheck hc_check(const MultilinearFunction& f, double t, double T) { return hc_check(MomentOracle(f), t, T); }

HcCheck hc_grid_min(const MultilinearFunction& f, double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::out_of_range("hc_grid_min: step must lie in (0, 1]");
  const MomentOracle oracle(f);
  const int k = static_cast<int>(std::round(1.0 / step));
  HcCheck worst;
  worst.margin = INFINITY;
  for (int a = 0; a <= k; ++a) {
    for (int b = a; b <= k; ++b) {
      const HcCheck c = hc_check(oracle, static_cast<double>(a) / k, static_cast<double>(b) / k);
      if (c.margin < worst.margin) worst = c;
    }
  }
  return worst;
}

GradientBoundCheck gradient_bound_check(const MultilinearFunction& f, double t) {
  if (!(t >= 0.0 && t < 1.0)) throw std::out_of_range("gradient_bound_check: t must lie in [0, 1)");
  const int n = f.arity();
  GradientBoundCheck c;
  c.t = t;
  c.coord_expect.assign(static_cast<std::size_t>(n), 0.0);
  c.coord_bound.assign(static_cast<std::size_t>(n), 0.0);
  const auto& co = f.coeffs();
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
    const int k = std::popcount(r);
    const double w = reveal_weight(t, n, k);
    if (w == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      const std::uint64_t rest = r & ~bit;
      const int kr = std::popcount(rest);
      std::vector<double> b(std::size_t{1} << kr);
      for (std::uint64_t j = 0; j < b.size(); ++j) b[j] = co[expand(j, rest) | bit];
      kernels::wht_serial(b);
      double sq = 0.0;
      for (double v : b) sq += v * v;
      c.coord_expect[static_cast<std::size_t>(i)] += w * std::ldexp(sq, -kr);
    }
  }
  for (int i = 0; i < n; ++i) {
    c.grad_norm_sq += c.coord_expect[static_cast<std::size_t>(i)];
    c.coord_bound[static_cast<std::size_t>(i)] = f.influence(i);
  }
  for (std::uint64_t S = 1; S < co.size(); ++S) {
    const int k = std::popcount(S);
    c.grad_norm_sq_series += k * co[S] * co[S] * std::pow(t, k - 1);
  }
  c.sup_norm = f.sup_norm();
  c.grad_bound = c.sup_norm * c.sup_norm / (1.0 - t);
  c.grad_slack = c.grad_bound - c.grad_norm_sq;
  c.coord_slack = INFINITY;
  for (int i = 0; i < n; ++i) {
    c.coord_slack = std::min(c.coord_slack, c.coord_bound[static_cast<std::size_t>(i)] - c.coord_expect[static_cast<std::size_t>(i)]);
  }
  if (n == 0) c.coord_slack = 0.0;
  return c;
}

// ---------------------------------------------------------------------------

PartialPoint RevealPath::state(double t) const {
  PartialPoint p(arity());
  for (int i = 0; i < arity(); ++i) {
    if (taus[static_cast<std::size_t>(i)] <= t) p.fix(i, x.sign(i));
  }
  return p;
}

std::vector<int> RevealPath::order() const {
  std::vector<int> idx(static_cast<std::size_t>(arity()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return taus[static_cast<std::size_t>(a)] < taus[static_cast<std::size_t>(b)];
  });
  return idx;
}

RevealPath sample_reveal_path(int n, Rng& rng) {
  RevealPath p;
  p.taus.resize(static_cast<std::size_t>(n));
  p.x = BitPoint(n);
  for (int i = 0; i < n; ++i) {
    p.taus[static_cast<std::size_t>(i)] = uniform01(rng);
    p.x.set_sign(i, random_sign(rng));
  }
  return p;
}

CoupledPath couple_to_discrete(const RevealPath& path, double epsilon) {
  const int n = path.arity();
  CoupledPath c;
  c.discrete.order = path.order();
  c.discrete.values.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) c.discrete.values[static_cast<std::size_t>(t)] = path.x.sign(c.discrete.order[static_cast<std::size_t>(t)]);
  const double horizon = 1.0 - epsilon / 2.0;
  for (double tau : path.taus) c.revealed += tau <= horizon ? 1 : 0;
  c.short_event = c.revealed < (1.0 - epsilon) * n;
  return c;
}

CouplingStats coupling_stats(const BooleanFunction& f, double epsilon, std::int64_t trials, std::uint64_t seed,
                             Exec exec) {
  if (trials < 1) throw std::invalid_argument("coupling_stats: trials must be >= 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::out_of_range("coupling_stats: epsilon outside (0, 1]");
  const int n = f.arity();
  std::vector<char> shorts(static_cast<std::size_t>(trials)), agree(static_cast<std::size_t>(trials));
  std::vector<double> ends(static_cast<std::size_t>(trials));
  for_each_index(exec, trials, [&](std::int64_t j) {
    Rng rng = make_stream(seed, {0x636f7570ULL, static_cast<std::uint64_t>(j)});
    const RevealPath path = sample_reveal_path(n, rng);
    const CoupledPath c = couple_to_discrete(path, epsilon);
    const auto u = static_cast<std::size_t>(j);
    shorts[u] = c.short_event;
    // Reveal order must be increasing in time along the derived permutation.
    bool ok = true;
    for (int t = 1; t < n; ++t) {
      ok = ok && path.taus[static_cast<std::size_t>(c.discrete.order[static_cast<std::size_t>(t - 1)])] <=
                     path.taus[static_cast<std::size_t>(c.discrete.order[static_cast<std::size_t>(t)])];
    }
    agree[u] = ok && c.discrete.endpoint() == path.x;
    ends[u] = f.eval(c.discrete.endpoint()) ? 1.0 : 0.0;
  });
  CouplingStats s;
  s.epsilon = epsilon;
  s.trials = trials;
  s.seed = seed;
  std::int64_t k = 0;
  for (std::size_t u = 0; u < shorts.size(); ++u) {
    k += shorts[u];
    s.orders_agree = s.orders_agree && agree[u];
  }
  s.p_short = proportion(k, trials);
  s.bound = std::exp(-epsilon * n / 8.0);
  s.holds = s.p_short.at_most(s.bound);
  s.endpoint_mean = sample_mean(ends);
  s.f0 = f.mean();
  return s;
}

namespace {

struct PathSup {
  double beta = 0.0;
  double beta_star = 0.0;
  bool star_exceeds = false;
};

// Sup of beta and beta* over the states visited along `order` for the first `steps` reveals.
PathSup sup_along(const BooleanFunction& f, const std::vector<int>& order, const std::vector<int>& values, int steps,
                  double theta) {
  PathSup s;
  PartialPoint x(f.arity());
  for (int t = 0;; ++t) {
    const double b = f.max_abs_derivative(x, /*alive_only=*/false);
    const double bs = f.max_abs_derivative(x, /*alive_only=*/true);
    s.beta = std::max(s.beta, b);
    s.beta_star = std::max(s.beta_star, bs);
    s.star_exceeds = s.star_exceeds || bs > b + 1e-15;
    if (t == steps || s.beta_star >= theta) break;
    x.fix(order[static_cast<std::size_t>(t)], values[static_cast<std::size_t>(t)]);
  }
  return s;
}

void fill_tail(BetaTailResult& r, const std::vector<PathSup>& sups) {
  std::int64_t hit = 0, hit_star = 0;
  for (const auto& s : sups) {
    hit += s.beta >= r.theta ? 1 : 0;
    hit_star += s.beta_star >= r.theta ? 1 : 0;
    r.star_exceeds_beta += s.star_exceeds ? 1 : 0;
  }
  r.tail = proportion(hit, r.trials);
  r.tail_star = proportion(hit_star, r.trials);
  r.holds = r.tail.at_most(r.bound);
}

void check_tail_args(double theta, std::int64_t trials) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::out_of_range("beta tail: theta must lie in (0, 1)");
  if (trials < 1) throw std::invalid_argument("beta tail: trials must be >= 1");
}

}  // namespace

BetaTailResult beta_tail(const BooleanFunction& f, double t, double theta, std::int64_t trials, std::uint64_t seed,
                         Exec exec) {
  check_tail_args(theta, trials);
  if (!(t >= 0.0 && t < 1.0)) throw std::out_of_range("beta_tail: t must lie in [0, 1)");
  const int n = f.arity();
  BetaTailResult r;
  r.t = t;
  r.theta = theta;
  r.trials = trials;
  r.seed = seed;
  r.max_influence = max_influence(f, InfluenceKind::kSpectral);
  r.bound = std::pow(theta, -3.0) * std::pow(r.max_influence, (1.0 - t) / 8.0);
  r.precondition_lhs = 8.0 / (1.0 - t) * std::log(2.0 / (1.0 - t));
  r.precondition_rhs = r.max_influence > 0.0 ? std::log(1.0 / r.max_influence) : INFINITY;
  r.precondition = r.precondition_lhs <= r.precondition_rhs;
  r.sharp_bound = std::pow(r.max_influence, (1.0 - t) / 40.0);
  r.sharp_applicable = theta >= std::pow(r.max_influence, (1.0 - t) / 30.0);
  std::vector<PathSup> sups(static_cast<std::size_t>(trials));
  for_each_index(exec, trials, [&](std::int64_t j) {
    Rng rng = make_stream(seed, {0x62657461ULL, static_cast<std::uint64_t>(j)});
    const RevealPath path = sample_reveal_path(n, rng);
    const std::vector<int> order = path.order();
    std::vector<int> values(order.size());
    int steps = 0;
    for (std::size_t s = 0; s < order.size(); ++s) {
      values[s] = path.x.sign(order[s]);
      steps += path.taus[static_cast<std::size_t>(order[s])] <= t ? 1 : 0;
    }
    sups[static_cast<std::size_t>(j)] = sup_along(f, order, values, steps, theta);
  });
  fill_tail(r, sups);
  return r;
}

BetaTailResult discrete_beta_tail(const BooleanFunction& f, double epsilon, double theta, std::int64_t trials,
                                  std::uint64_t seed, Exec exec) {
  check_tail_args(theta, trials);
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::out_of_range("discrete_beta_tail: epsilon outside (0, 1]");
  const int n = f.arity();
  BetaTailResult r;
  r.epsilon = epsilon;
  r.t = 1.0 - epsilon / 2.0;
  r.theta = theta;
  r.trials = trials;
  r.seed = seed;
  r.max_influence = max_influence(f, InfluenceKind::kSpectral);
  r.bound = std::pow(theta, -3.0) * std::pow(r.max_influence, epsilon / 16.0) + std::exp(-epsilon * n / 8.0);
  r.precondition_lhs = 16.0 / epsilon * std::log(4.0 / epsilon);
  r.precondition_rhs = r.max_influence > 0.0 ? std::log(1.0 / r.max_influence) : INFINITY;
  r.precondition = r.precondition_lhs <= r.precondition_rhs;
  r.sharp_bound = std::pow(r.max_influence, epsilon / 80.0);
  r.sharp_applicable = theta >= std::pow(r.max_influence, epsilon / 60.0);
  const int steps = default_horizon(n, epsilon);
  std::vector<PathSup> sups(static_cast<std::size_t>(trials));
  for_each_index(exec, trials, [&](std::int64_t j) {
    Rng rng = make_stream(seed, {0x64626574ULL, static_cast<std::uint64_t>(j)});
    const ProcessPath path = run_uniform(n, rng);
    sups[static_cast<std::size_t>(j)] = sup_along(f, path.order, path.values, steps, theta);
  });
  fill_tail(r, sups);
  return r;
}

}  // namespace boolrr
