#pragma once

// The BooleanFunction contract: evaluation at cube points, and the
// multilinear extension at ternary points (conditional mean over the alive
// coordinates) together with its partial derivatives.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "boolrr/bits.hpp"
#include "boolrr/truth_table.hpp"

namespace boolrr {

enum class Constancy { kNonconstant, kZero, kOne };

struct SparseGradient {
  std::vector<int> coords;
  std::vector<double> values;

  double norm_sq() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s;
  }
};

class BooleanFunction {
 public:
  virtual ~BooleanFunction() = default;

  virtual int arity() const = 0;
  virtual bool eval(const BitPoint& x) const = 0;

  // Multilinear extension at x: the average of f over completions of the alive coordinates.
  virtual double cond_mean(const PartialPoint& x) const = 0;

  // (f(x with x_i=+1) - f(x with x_i=-1)) / 2, overriding x_i if it is fixed.
  virtual double derivative_at(int i, const PartialPoint& x) const;

  // max_i |derivative_at(i, x)| over all coordinates, or over alive ones only.
  virtual double max_abs_derivative(const PartialPoint& x, bool alive_only) const;

  // Exact decision of whether f restricted to the subcube of x is constant.
  virtual Constancy constancy(const PartialPoint& x) const;

  // P_x[f(x) != f(x with coordinate i flipped)].
  virtual double influence_flip(int i) const;

  // True/false when monotonicity is known by construction; nullopt otherwise.
  virtual std::optional<bool> known_monotone() const { return std::nullopt; }

  virtual std::string describe() const = 0;

  // Backing table for table-backed functions.
  virtual const TruthTable* table() const { return nullptr; }

  double mean() const { return cond_mean(PartialPoint(arity())); }

  // Partial derivative at an alive coordinate; throws if i is fixed in x.
  double cond_derivative(int i, const PartialPoint& x) const;

  // Derivatives at the alive coordinates of x.
  SparseGradient gradient(const PartialPoint& x) const;

  // Truth table by evaluation (arity <= 24).
  TruthTable materialize() const;
};

using FunctionPtr = std::shared_ptr<const BooleanFunction>;

// f given by a truth table. Means and derivatives are exact counts over the free subcube.
class TableFunction final : public BooleanFunction {
 public:
  explicit TableFunction(TruthTable t, std::string label = "table");

  int arity() const override { return table_.arity(); }
  bool eval(const BitPoint& x) const override;
  double cond_mean(const PartialPoint& x) const override;
  double derivative_at(int i, const PartialPoint& x) const override;
  Constancy constancy(const PartialPoint& x) const override;
  double influence_flip(int i) const override;
  std::string describe() const override { return label_; }
  const TruthTable* table() const override { return &table_; }

  // Number of completions of x on which f = 1.
  std::uint64_t count_ones(const PartialPoint& x) const;
  std::uint64_t count_ones(std::uint64_t fixed_mask, std::uint64_t sign_mask) const;

 private:
  TruthTable table_;
  std::string label_;
};

// 1 - f.
class ComplementFunction final : public BooleanFunction {
 public:
  explicit ComplementFunction(FunctionPtr f) : f_(std::move(f)) {}

  int arity() const override { return f_->arity(); }
  bool eval(const BitPoint& x) const override { return !f_->eval(x); }
  double cond_mean(const PartialPoint& x) const override { return 1.0 - f_->cond_mean(x); }
  double derivative_at(int i, const PartialPoint& x) const override {
    return -f_->derivative_at(i, x);
  }
  double max_abs_derivative(const PartialPoint& x, bool alive_only) const override {
    return f_->max_abs_derivative(x, alive_only);
  }
  Constancy constancy(const PartialPoint& x) const override;
  double influence_flip(int i) const override { return f_->influence_flip(i); }
  std::optional<bool> known_monotone() const override {
    if (auto m = f_->known_monotone(); m && *m && f_->mean() > 0.0 && f_->mean() < 1.0) return false;
    return std::nullopt;
  }
  std::string describe() const override { return "not(" + f_->describe() + ")"; }

 private:
  FunctionPtr f_;
};

FunctionPtr make_table_function(TruthTable t, std::string label = "table");
FunctionPtr make_complement(FunctionPtr f);

// Exhaustive monotonicity test on a table: flipping a coordinate from +1 to -1 never decreases f.
bool is_monotone(const TruthTable& t);

}  // namespace boolrr
