#include "boolrr/restriction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace boolrr {

Restriction sample_fixed_alive(int n, int k_alive, Rng& rng) {
  if (k_alive < 0 || k_alive > n) throw std::out_of_range("sample_fixed_alive: k_alive outside [0, n]");
  const std::vector<int> perm = random_permutation(n, rng);
  Restriction r{PartialPoint(n)};
  // The first k_alive entries of the permutation stay alive.
  for (int j = k_alive; j < n; ++j) r.point.fix(perm[static_cast<std::size_t>(j)], random_sign(rng));
  return r;
}

Restriction sample_independent(int n, double p_fix, Rng& rng) {
  if (!(p_fix >= 0.0 && p_fix <= 1.0)) throw std::out_of_range("sample_independent: p_fix outside [0, 1]");
  Restriction r{PartialPoint(n)};
  for (int i = 0; i < n; ++i) {
    const bool fixed = bernoulli(rng, p_fix);
    const int s = random_sign(rng);
    if (fixed) r.point.fix(i, s);
  }
  return r;
}

Restriction compose(const Restriction& r1, const Restriction& r2) {
  const std::vector<int> alive = r1.alive_indices();
  require_same_arity(static_cast<int>(alive.size()), r2.arity(), "compose");
  Restriction out = r1;
  for (int j = 0; j < r2.arity(); ++j) {
    if (r2.point.is_fixed(j)) out.point.fix(alive[static_cast<std::size_t>(j)], r2.point.value(j));
  }
  return out;
}

// ---------------------------------------------------------------------------

RestrictedFunction::RestrictedFunction(FunctionPtr parent, Restriction r)
    : parent_(std::move(parent)), r_(std::move(r)), alive_(r_.alive_indices()) {
  require_same_arity(parent_->arity(), r_.arity(), "RestrictedFunction");
}

PartialPoint RestrictedFunction::lift(const PartialPoint& x) const {
  require_same_arity(arity(), x.arity(), "RestrictedFunction::lift");
  PartialPoint p = r_.point;
  for (std::size_t j = 0; j < alive_.size(); ++j) {
    if (x.is_fixed(static_cast<int>(j))) p.assign(alive_[j], x.value(static_cast<int>(j)));
  }
  return p;
}

bool RestrictedFunction::eval(const BitPoint& x) const {
  require_same_arity(arity(), x.arity(), "eval");
  PartialPoint p = r_.point;
  for (std::size_t j = 0; j < alive_.size(); ++j) p.assign(alive_[j], x.sign(static_cast<int>(j)));
  return parent_->eval(p.to_point());
}

double RestrictedFunction::cond_mean(const PartialPoint& x) const { return parent_->cond_mean(lift(x)); }

double RestrictedFunction::derivative_at(int i, const PartialPoint& x) const {
  return parent_->derivative_at(alive_[static_cast<std::size_t>(i)], lift(x));
}

Constancy RestrictedFunction::constancy(const PartialPoint& x) const { return parent_->constancy(lift(x)); }

FunctionPtr restrict(const FunctionPtr& f, const Restriction& r) {
  require_same_arity(f->arity(), r.arity(), "restrict");
  if (const TruthTable* t = f->table()) {
    const std::vector<int> alive = r.alive_indices();
    const int k = static_cast<int>(alive.size());
    const std::uint64_t base = r.point.sign_mask();
    TruthTable out = TruthTable::from_predicate(k, [&](std::uint64_t j) {
      std::uint64_t idx = base;
      for (int b = 0; b < k; ++b) {
        if ((j >> b) & 1U) idx |= std::uint64_t{1} << alive[static_cast<std::size_t>(b)];
      }
      return t->get(idx);
    });
    return make_table_function(std::move(out), f->describe() + "|restricted");
  }
  return std::make_shared<RestrictedFunction>(f, r);
}

// ---------------------------------------------------------------------------

int alive_for_rho(int n, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::out_of_range("rho outside [0, 1]");
  // Guard against 0.3 * 10 = 3.0000000000000004.
  const double x = rho * n;
  const double r = std::round(x);
  const int k = std::abs(x - r) < 1e-9 ? static_cast<int>(r) : static_cast<int>(std::ceil(x));
  return std::clamp(k, 0, n);
}

std::vector<ScanResult> scan(const BooleanFunction& f, const std::vector<double>& rho_grid,
                             std::int64_t trials, std::uint64_t seed, ScanMode mode, Exec exec) {
  if (trials < 1) throw std::invalid_argument("scan: trials must be >= 1");
  const int n = f.arity();
  std::vector<ScanResult> out;
  out.reserve(rho_grid.size());
  for (std::size_t g = 0; g < rho_grid.size(); ++g) {
    const double rho = rho_grid[g];
    const int k_alive = mode == ScanMode::kFixed ? alive_for_rho(n, rho) : 0;
    if (mode == ScanMode::kIndependent && !(rho >= 0.0 && rho <= 1.0)) throw std::out_of_range("rho outside [0, 1]");
    std::vector<double> means(static_cast<std::size_t>(trials));
    std::vector<char> constant(static_cast<std::size_t>(trials));
    std::vector<char> constant_one(static_cast<std::size_t>(trials));
    for_each_index(exec, trials, [&](std::int64_t j) {
      Rng rng = make_stream(seed, {0x7363616eULL, g, static_cast<std::uint64_t>(j)});
      const Restriction r = mode == ScanMode::kFixed ? sample_fixed_alive(n, k_alive, rng)
                                                     : sample_independent(n, 1.0 - rho, rng);
      const Constancy c = f.constancy(r.point);
      const auto u = static_cast<std::size_t>(j);
      constant[u] = c != Constancy::kNonconstant;
      constant_one[u] = c == Constancy::kOne;
      means[u] = c == Constancy::kOne ? 1.0 : c == Constancy::kZero ? 0.0 : f.cond_mean(r.point);
    });
    ScanResult res;
    res.rho = rho;
    res.mode = mode;
    res.trials = trials;
    res.seed = seed;
    res.alive_count = k_alive;
    std::int64_t nc = 0, n1 = 0;
    std::vector<double> vars(means.size());
    for (std::size_t j = 0; j < means.size(); ++j) {
      nc += constant[j];
      n1 += constant_one[j];
      vars[j] = constant[j] ? 0.0 : means[j] * (1.0 - means[j]);
    }
    res.p_constant = proportion(nc, trials);
    res.p_constant_one = proportion(n1, trials);
    res.mean_restricted = sample_mean(means);
    std::sort(vars.begin(), vars.end());
    res.var_min = vars.front();
    res.var_q05 = quantile_sorted(vars, 0.05);
    res.var_q50 = quantile_sorted(vars, 0.50);
    res.var_q95 = quantile_sorted(vars, 0.95);
    out.push_back(res);
  }
  return out;
}

double tribes_survival_formula(int w, int n) {
  if (w < 1 || n < 0 || n % w != 0) throw std::invalid_argument("tribes_survival_formula: n must be a multiple of w");
  const double clause_unhit = std::pow(0.5 + 0.5 / w, w);
  return std::pow(1.0 - clause_unhit, n / w);
}

}  // namespace boolrr
