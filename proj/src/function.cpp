#include "boolrr/function.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace boolrr {

double BooleanFunction::derivative_at(int i, const PartialPoint& x) const {
  return 0.5 * (cond_mean(x.with(i, 1)) - cond_mean(x.with(i, -1)));
}

double BooleanFunction::max_abs_derivative(const PartialPoint& x, bool alive_only) const {
  double best = 0.0;
  for (int i = 0; i < arity(); ++i) {
    if (alive_only && x.is_fixed(i)) continue;
    best = std::max(best, std::abs(derivative_at(i, x)));
  }
  return best;
}

Constancy BooleanFunction::constancy(const PartialPoint& x) const {
  const double m = cond_mean(x);
  if (m == 0.0) return Constancy::kZero;
  if (m == 1.0) return Constancy::kOne;
  return Constancy::kNonconstant;
}

double BooleanFunction::influence_flip(int i) const {
  const TruthTable t = materialize();
  std::uint64_t differ = 0;
  const std::uint64_t bit = std::uint64_t{1} << i;
  for (std::uint64_t k = 0; k < t.size(); ++k) {
    if ((k & bit) == 0 && t.get(k) != t.get(k | bit)) differ += 2;
  }
  return std::ldexp(static_cast<double>(differ), -arity());
}

double BooleanFunction::cond_derivative(int i, const PartialPoint& x) const {
  require_same_arity(arity(), x.arity(), "cond_derivative");
  if (i < 0 || i >= arity()) throw std::out_of_range("cond_derivative: coordinate out of range");
  if (x.is_fixed(i)) throw std::logic_error("cond_derivative: coordinate " + std::to_string(i) + " is fixed");
  return derivative_at(i, x);
}

SparseGradient BooleanFunction::gradient(const PartialPoint& x) const {
  require_same_arity(arity(), x.arity(), "gradient");
  SparseGradient g;
  for (int i = 0; i < arity(); ++i) {
    if (x.is_fixed(i)) continue;
    g.coords.push_back(i);
    g.values.push_back(derivative_at(i, x));
  }
  return g;
}

TruthTable BooleanFunction::materialize() const {
  if (const TruthTable* t = table()) return *t;
  const int n = arity();
  return TruthTable::from_predicate(n, [&](std::uint64_t k) { return eval(BitPoint::from_index(n, k)); });
}

// ---------------------------------------------------------------------------

TableFunction::TableFunction(TruthTable t, std::string label)
    : table_(std::move(t)), label_(std::move(label)) {}

bool TableFunction::eval(const BitPoint& x) const {
  require_same_arity(arity(), x.arity(), "eval");
  return table_.get(x.index());
}

std::uint64_t TableFunction::count_ones(std::uint64_t fixed_mask, std::uint64_t sign_mask) const {
  const std::uint64_t all = table_.size() - 1;
  const std::uint64_t alive = ~fixed_mask & all;
  const std::uint64_t base = sign_mask & fixed_mask;
  if (alive == all) return table_.ones();
  std::uint64_t count = 0;
  std::uint64_t sub = 0;
  // Walk every submask of `alive`.
  do {
    count += table_.get(base | sub) ? 1 : 0;
    sub = (sub - alive) & alive;
  } while (sub != 0);
  return count;
}

std::uint64_t TableFunction::count_ones(const PartialPoint& x) const {
  require_same_arity(arity(), x.arity(), "count_ones");
  return count_ones(x.fixed_mask(), x.sign_mask());
}

double TableFunction::cond_mean(const PartialPoint& x) const {
  const std::uint64_t c = count_ones(x);
  return std::ldexp(static_cast<double>(c), -x.alive_count());
}

double TableFunction::derivative_at(int i, const PartialPoint& x) const {
  require_same_arity(arity(), x.arity(), "derivative_at");
  const std::uint64_t bit = std::uint64_t{1} << i;
  const std::uint64_t fixed = x.fixed_mask() | bit;
  const std::uint64_t plus = count_ones(fixed, x.sign_mask() & ~bit);
  const std::uint64_t minus = count_ones(fixed, x.sign_mask() | bit);
  const int alive = std::popcount(~fixed & (table_.size() - 1));
  const double diff = static_cast<double>(plus) - static_cast<double>(minus);
  return std::ldexp(diff, -alive - 1);
}

Constancy TableFunction::constancy(const PartialPoint& x) const {
  const std::uint64_t c = count_ones(x);
  if (c == 0) return Constancy::kZero;
  if (c == (std::uint64_t{1} << x.alive_count())) return Constancy::kOne;
  return Constancy::kNonconstant;
}

double TableFunction::influence_flip(int i) const {
  const std::uint64_t bit = std::uint64_t{1} << i;
  std::uint64_t differ = 0;
  for (std::uint64_t k = 0; k < table_.size(); ++k) {
    if ((k & bit) == 0 && table_.get(k) != table_.get(k | bit)) differ += 2;
  }
  return std::ldexp(static_cast<double>(differ), -arity());
}

Constancy ComplementFunction::constancy(const PartialPoint& x) const {
  switch (f_->constancy(x)) {
    case Constancy::kZero:
      return Constancy::kOne;
    case Constancy::kOne:
      return Constancy::kZero;
    default:
      return Constancy::kNonconstant;
  }
}

FunctionPtr make_table_function(TruthTable t, std::string label) {
  return std::make_shared<TableFunction>(std::move(t), std::move(label));
}

FunctionPtr make_complement(FunctionPtr f) { return std::make_shared<ComplementFunction>(std::move(f)); }

bool is_monotone(const TruthTable& t) {
  const int n = t.arity();
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t k = 0; k < t.size(); ++k) {
      if ((k & bit) == 0 && t.get(k) && !t.get(k | bit)) return false;
    }
  }
  return true;
}

}  // namespace boolrr
