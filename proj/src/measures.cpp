#include "boolrr/measures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "boolrr/errors.hpp"
#include "boolrr/process.hpp"
#include "boolrr/restriction.hpp"
#include "boolrr/rng.hpp"

namespace boolrr {

namespace {

BitPoint flipped(const BitPoint& x, std::uint64_t mask) {
  BitPoint y = x;
  for (std::uint64_t m = mask; m != 0; m &= m - 1) y.flip(std::countr_zero(m));
  return y;
}

}  // namespace

int sensitivity(const BooleanFunction& f, const BitPoint& x) {
  require_same_arity(f.arity(), x.arity(), "sensitivity");
  const bool fx = f.eval(x);
  int s = 0;
  BitPoint y = x;
  for (int i = 0; i < f.arity(); ++i) {
    y.flip(i);
    s += f.eval(y) != fx ? 1 : 0;
    y.flip(i);
  }
  return s;
}

double average_sensitivity(const BooleanFunction& f) {
  double s = 0.0;
  for (double v : influences(f, InfluenceKind::kFlip)) s += v;
  return s;
}

bool BlockCertificate::verify(const BooleanFunction& f) const {
  const bool fx = f.eval(x);
  std::uint64_t used = 0;
  for (std::uint64_t b : blocks) {
    if (b == 0 || (b & used) != 0) return false;
    used |= b;
    if (f.eval(flipped(x, b)) == fx) return false;
  }
  return true;
}

BlockSensitivity bs_exact(const BooleanFunction& f, const BitPoint& x) {
  require_same_arity(f.arity(), x.arity(), "bs_exact");
  const int n = f.arity();
  if (n > kMaxBlockSearchArity) throw std::length_error("bs_exact: arity above search cap of 14");
  const std::uint64_t size = std::uint64_t{1} << n;
  const bool fx = f.eval(x);

  // sensitive[S]: flipping S changes f. covered[S]: some proper nonempty subset is sensitive.
  std::vector<char> sensitive(size), covered(size);
  for (std::uint64_t s = 1; s < size; ++s) sensitive[s] = f.eval(flipped(x, s)) != fx;
  std::vector<std::uint64_t> minimal;
  for (std::uint64_t s = 1; s < size; ++s) {
    for (std::uint64_t m = s; m != 0; m &= m - 1) {
      const std::uint64_t sub = s & ~(m & -m);
      if (sub != 0 && (sensitive[sub] || covered[sub])) {
        covered[s] = 1;
        break;
      }
    }
    if (sensitive[s] && !covered[s]) minimal.push_back(s);
  }

  // Blocks grouped by lowest element; branch on the lowest available coordinate.
  std::vector<std::vector<std::uint64_t>> by_low(static_cast<std::size_t>(n));
  for (std::uint64_t b : minimal) by_low[static_cast<std::size_t>(std::countr_zero(b))].push_back(b);
  for (auto& v : by_low) std::sort(v.begin(), v.end(), [](auto a, auto b) { return std::popcount(a) < std::popcount(b); });
  std::size_t min_block = static_cast<std::size_t>(n) + 1;
  for (std::uint64_t b : minimal) min_block = std::min<std::size_t>(min_block, static_cast<std::size_t>(std::popcount(b)));

  std::unordered_map<std::uint64_t, int> memo;
  std::function<int(std::uint64_t)> best = [&](std::uint64_t avail) -> int {
    if (avail == 0) return 0;
    if (static_cast<std::size_t>(std::popcount(avail)) < min_block) return 0;
    if (auto it = memo.find(avail); it != memo.end()) return it->second;
    const int e = std::countr_zero(avail);
    int result = best(avail & (avail - 1));  // leave e uncovered
    const int ceiling = static_cast<int>(static_cast<std::size_t>(std::popcount(avail)) / min_block);
    for (std::uint64_t b : by_low[static_cast<std::size_t>(e)]) {
      if (result >= ceiling) break;
      if ((b & ~avail) != 0) continue;
      result = std::max(result, 1 + best(avail & ~b));
    }
    memo.emplace(avail, result);
    return result;
  };

  BlockSensitivity out;
  out.minimal_blocks = static_cast<int>(minimal.size());
  out.certificate.x = x;
  std::uint64_t avail = size - 1;
  out.value = minimal.empty() ? 0 : best(avail);
  // Walk the memo back to a packing.
  int remaining = out.value;
  while (remaining > 0) {
    const int e = std::countr_zero(avail);
    if (best(avail & (avail - 1)) == remaining) {
      avail &= avail - 1;
      continue;
    }
    for (std::uint64_t b : by_low[static_cast<std::size_t>(e)]) {
      if ((b & ~avail) == 0 && 1 + best(avail & ~b) == remaining) {
        out.certificate.blocks.push_back(b);
        avail &= ~b;
        --remaining;
        break;
      }
    }
  }
  return out;
}

std::vector<std::uint64_t> equipartition(const std::vector<int>& perm, int M) {
  const int n = static_cast<int>(perm.size());
  if (M < 1 || M > n) throw std::invalid_argument("equipartition: M must lie in [1, n]");
  if (n > 64) throw std::invalid_argument("equipartition: n > 64");
  std::vector<std::uint64_t> blocks(static_cast<std::size_t>(M), 0);
  for (int j = 0; j < n; ++j) blocks[static_cast<std::size_t>(j % M)] |= std::uint64_t{1} << perm[static_cast<std::size_t>(j)];
  return blocks;
}

int sensitive_block_count(const BooleanFunction& f, const BitPoint& x, const std::vector<std::uint64_t>& blocks) {
  const bool fx = f.eval(x);
  int count = 0;
  for (std::uint64_t b : blocks) {
    if (std::popcount(b) > kMaxPartitionBlock) throw std::length_error("sensitive_block_count: block above 20 coordinates");
    // Walk the nonempty submasks of b.
    for (std::uint64_t t = b; t != 0; t = (t - 1) & b) {
      if (f.eval(flipped(x, t)) != fx) {
        ++count;
        break;
      }
    }
  }
  return count;
}

BsPartitionResult bs_partition_estimate(const BooleanFunction& f, int M, std::int64_t trials, std::uint64_t seed,
                                        Exec exec) {
  const int n = f.arity();
  if (trials < 1) throw std::invalid_argument("bs_partition_estimate: trials must be >= 1");
  if (M < 1 || M > n) throw std::invalid_argument("bs_partition_estimate: M must lie in [1, n]");
  if ((n + M - 1) / M > kMaxPartitionBlock) throw std::length_error("bs_partition_estimate: blocks above 20 coordinates");
  std::vector<int> counts(static_cast<std::size_t>(trials));
  for_each_index(exec, trials, [&](std::int64_t j) {
    Rng rng = make_stream(seed, {0x62737061ULL, static_cast<std::uint64_t>(j)});
    BitPoint x(n);
    for (int i = 0; i < n; ++i) x.set_sign(i, random_sign(rng));
    const auto blocks = equipartition(random_permutation(n, rng), M);
    counts[static_cast<std::size_t>(j)] = sensitive_block_count(f, x, blocks);
  });
  BsPartitionResult r;
  r.M = M;
  r.trials = trials;
  r.seed = seed;
  r.histogram.assign(static_cast<std::size_t>(M) + 1, 0);
  std::vector<double> c(counts.size()), frac(counts.size());
  std::int64_t below = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    ++r.histogram[static_cast<std::size_t>(counts[j])];
    c[j] = counts[j];
    frac[j] = static_cast<double>(M - counts[j]) / M;
    below += 2 * counts[j] < M ? 1 : 0;
  }
  r.mean_count = sample_mean(c);
  r.p_below_half = proportion(below, trials);
  r.p_block_constant = sample_mean(frac);
  r.lhs = r.p_below_half.value / 2.0;
  r.rhs = r.p_block_constant.value;
  const double sigma = std::hypot(r.p_below_half.std_error / 2.0, r.p_block_constant.std_error);
  r.double_counting_holds = r.lhs <= r.rhs + 3.0 * sigma;
  return r;
}

// ---------------------------------------------------------------------------

int dt_exact(const BooleanFunction& f) {
  const int n = f.arity();
  if (n > kMaxDecisionTreeArity) throw std::length_error("dt_exact: arity above cap of 12");
  std::vector<std::uint32_t> pow3(static_cast<std::size_t>(n) + 1, 1);
  for (int i = 1; i <= n; ++i) pow3[static_cast<std::size_t>(i)] = pow3[static_cast<std::size_t>(i) - 1] * 3;
  // Memo on the base-3 code of the partial point: digit 0 alive, 1 for +1, 2 for -1.
  std::vector<std::int8_t> memo(pow3[static_cast<std::size_t>(n)], -1);
  PartialPoint p(n);
  std::function<int(std::uint32_t)> solve = [&](std::uint32_t key) -> int {
    if (memo[key] >= 0) return memo[key];
    int result = 0;
    if (f.constancy(p) == Constancy::kNonconstant) {
      result = n + 1;
      for (int i = 0; i < n && result > 1; ++i) {
        if (p.is_fixed(i)) continue;
        int worst = 0;
        for (int s : {1, -1}) {
          p.fix(i, s);
          worst = std::max(worst, solve(key + pow3[static_cast<std::size_t>(i)] * (s > 0 ? 1U : 2U)));
          p.release(i);
          if (1 + worst >= result) break;
        }
        result = std::min(result, 1 + worst);
      }
    }
    memo[key] = static_cast<std::int8_t>(result);
    return result;
  };
  return solve(0);
}

int dt_naive(const BooleanFunction& f) {
  const int n = f.arity();
  if (n > kMaxDecisionTreeArity) throw std::length_error("dt_naive: arity above cap of 12");
  std::function<int(PartialPoint&)> solve = [&](PartialPoint& p) -> int {
    // Constancy by evaluating every completion.
    const std::vector<int> alive = p.alive_indices();
    bool seen0 = false, seen1 = false;
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << alive.size()); ++c) {
      PartialPoint q = p;
      for (std::size_t j = 0; j < alive.size(); ++j) q.fix(alive[j], ((c >> j) & 1U) ? -1 : 1);
      (f.eval(q.to_point()) ? seen1 : seen0) = true;
    }
    if (!(seen0 && seen1)) return 0;
    int best = n + 1;
    for (int i : alive) {
      int worst = 0;
      for (int s : {1, -1}) {
        p.fix(i, s);
        worst = std::max(worst, solve(p));
        p.release(i);
      }
      best = std::min(best, 1 + worst);
    }
    return best;
  };
  PartialPoint p(n);
  return solve(p);
}

OsssCheck osss_check(const BooleanFunction& f, InfluenceKind kind) {
  OsssCheck c;
  c.max_influence = max_influence(f, kind);
  c.depth = dt_exact(f);
  c.lhs = c.max_influence * c.depth;
  c.rhs = variance(f);
  c.holds = c.lhs >= c.rhs - 1e-12;
  return c;
}

// ---------------------------------------------------------------------------

MonotoneInfluenceResult monotone_restricted_influence(const BooleanFunction& f, double rho, std::int64_t trials,
                                                      std::uint64_t seed, Exec exec) {
  if (trials < 1) throw std::invalid_argument("monotone_restricted_influence: trials must be >= 1");
  const int n = f.arity();
  MonotoneInfluenceResult r;
  if (const TruthTable* t = f.table(); t != nullptr && n <= kMaxBlockSearchArity) {
    if (!is_monotone(*t)) throw DomainError("monotone_restricted_influence: function is not monotone");
    r.monotone_verified = true;
  } else if (auto known = f.known_monotone(); known.has_value()) {
    if (!*known) throw DomainError("monotone_restricted_influence: function is not monotone");
  } else if (n <= kMaxBlockSearchArity) {
    if (!is_monotone(f.materialize())) throw DomainError("monotone_restricted_influence: function is not monotone");
    r.monotone_verified = true;
  } else {
    throw DomainError("monotone_restricted_influence: monotonicity unknown and arity above exhaustive cap");
  }
  r.rho = rho;
  r.trials = trials;
  r.seed = seed;
  r.alive = alive_for_rho(n, rho);
  r.max_influence = max_influence(f, InfluenceKind::kSpectral);
  r.threshold = std::pow(r.max_influence, rho / 30.0);
  r.bound = std::pow(r.max_influence, rho / 40.0) + std::exp(-rho * n / 8.0);
  const int steps = n - r.alive;
  std::vector<double> beta(static_cast<std::size_t>(trials));
  for_each_index(exec, trials, [&](std::int64_t j) {
    Rng rng = make_stream(seed, {0x6d6f6e6fULL, static_cast<std::uint64_t>(j)});
    const ProcessPath path = run_uniform(n, rng);
    beta[static_cast<std::size_t>(j)] = f.max_abs_derivative(path.state(steps), /*alive_only=*/true);
  });
  std::int64_t hit = 0, hit_spec = 0;
  for (double b : beta) {
    hit += b >= r.threshold ? 1 : 0;
    // For monotone f the restricted spectral influence at i is |d_i f(X)| / 2.
    hit_spec += b / 2.0 >= r.threshold ? 1 : 0;
  }
  r.tail = proportion(hit, trials);
  r.tail_spectral = proportion(hit_spec, trials);
  r.mean_beta_star = sample_mean(beta);
  return r;
}

}  // namespace boolrr
