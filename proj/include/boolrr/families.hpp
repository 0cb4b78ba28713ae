#pragma once

// Closed-form function families and the textual FunctionSpec grammar
//   name(:key=val(,key=val)*)?
// e.g. "tribes:w=5", "maj:n=101", "table:path=f.tt".

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "boolrr/function.hpp"

namespace boolrr {

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FamilyKind { kTable, kTribes, kMajority, kParity, kAnd, kOr, kDictator, kRandom, kConstant };

struct FunctionSpec {
  FamilyKind kind = FamilyKind::kConstant;
  int n = 0;             // arity; for tribes derived from w unless given
  int w = 0;             // tribes clause width
  int index = 0;         // dictator coordinate (0-based)
  bool allow_even = false;
  bool value = false;    // constant value
  std::uint64_t seed = 0;
  double bias = 0.5;
  std::string path;      // table file
  std::string text;      // original string, echoed into output records
};

FunctionSpec parse_spec(std::string_view text);
FunctionPtr make_family(const FunctionSpec& spec);
inline FunctionPtr make_family(std::string_view text) { return make_family(parse_spec(text)); }

// Smallest multiple of w with (1 - 2^-w)^{n/w} <= 1/2.
int tribes_arity(int w);

// P[Bin(k, 1/2) <= m]; exact for k <= 62.
double binomial_half_cdf(int k, long long m);

// Tribes: AND of n/w disjoint ORs of width w. Clause j covers coordinates [j*w, (j+1)*w).
class TribesFunction final : public BooleanFunction {
 public:
  TribesFunction(int w, int n);

  int width() const { return w_; }
  int clauses() const { return n_ / w_; }

  int arity() const override { return n_; }
  bool eval(const BitPoint& x) const override;
  double cond_mean(const PartialPoint& x) const override;
  double derivative_at(int i, const PartialPoint& x) const override;
  double max_abs_derivative(const PartialPoint& x, bool alive_only) const override;
  Constancy constancy(const PartialPoint& x) const override;
  double influence_flip(int i) const override;
  std::optional<bool> known_monotone() const override { return true; }
  std::string describe() const override;

 private:
  struct ClauseState {
    int alive = 0;
    int fixed_true = 0;
  };
  ClauseState clause_state(int j, const PartialPoint& x) const;
  static double clause_mean(ClauseState s);

  int w_;
  int n_;
};

// MAJ_n(x) = 0 if sum x_i > 0, 1 otherwise.
class MajorityFunction final : public BooleanFunction {
 public:
  MajorityFunction(int n, bool allow_even);

  int arity() const override { return n_; }
  bool eval(const BitPoint& x) const override;
  double cond_mean(const PartialPoint& x) const override;
  double derivative_at(int i, const PartialPoint& x) const override;
  double max_abs_derivative(const PartialPoint& x, bool alive_only) const override;
  Constancy constancy(const PartialPoint& x) const override;
  double influence_flip(int i) const override;
  std::optional<bool> known_monotone() const override { return true; }
  std::string describe() const override { return "maj:n=" + std::to_string(n_); }

 private:
  // P[s + B <= 0], B a sum of k uniform signs.
  static double tail(long long s, int k);
  double derivative_from(long long others_sum, int others_alive) const;

  int n_;
};

// Parity: 1 iff an odd number of coordinates are -1, i.e. f = (1 - chi_[n]) / 2.
class ParityFunction final : public BooleanFunction {
 public:
  explicit ParityFunction(int n);
  int arity() const override { return n_; }
  bool eval(const BitPoint& x) const override;
  double cond_mean(const PartialPoint& x) const override;
  double derivative_at(int i, const PartialPoint& x) const override;
  Constancy constancy(const PartialPoint& x) const override;
  double influence_flip(int) const override { return 1.0; }
  std::optional<bool> known_monotone() const override { return n_ == 0; }
  std::string describe() const override { return "parity:n=" + std::to_string(n_); }

 private:
  int n_;
};

// AND: 1 iff every coordinate is -1.
class AndFunction final : public BooleanFunction {
 public:
  explicit AndFunction(int n);
  int arity() const override { return n_; }
  bool eval(const BitPoint& x) const override;
  double cond_mean(const PartialPoint& x) const override;
  double derivative_at(int i, const PartialPoint& x) const override;
  Constancy constancy(const PartialPoint& x) const override;
  double influence_flip(int i) const override;
  std::optional<bool> known_monotone() const override { return true; }
  std::string describe() const override { return "and:n=" + std::to_string(n_); }

 private:
  int n_;
};

// OR: 1 iff some coordinate is -1.
class OrFunction final : public BooleanFunction {
 public:
  explicit OrFunction(int n);
  int arity() const override { return n_; }
  bool eval(const BitPoint& x) const override;
  double cond_mean(const PartialPoint& x) const override;
  double derivative_at(int i, const PartialPoint& x) const override;
  Constancy constancy(const PartialPoint& x) const override;
  double influence_flip(int i) const override;
  std::optional<bool> known_monotone() const override { return true; }
  std::string describe() const override { return "or:n=" + std::to_string(n_); }

 private:
  int n_;
};

// Dictator on coordinate i: f = (1 - x_i) / 2.
class DictatorFunction final : public BooleanFunction {
 public:
  DictatorFunction(int n, int i);
  int arity() const override { return n_; }
  bool eval(const BitPoint& x) const override;
  double cond_mean(const PartialPoint& x) const override;
  double derivative_at(int i, const PartialPoint& x) const override;
  Constancy constancy(const PartialPoint& x) const override;
  double influence_flip(int i) const override { return i == index_ ? 1.0 : 0.0; }
  std::optional<bool> known_monotone() const override { return true; }
  std::string describe() const override {
    return "dict:n=" + std::to_string(n_) + ",i=" + std::to_string(index_);
  }

 private:
  int n_;
  int index_;
};

class ConstantFunction final : public BooleanFunction {
 public:
  ConstantFunction(int n, bool value) : n_(n), value_(value) {}
  int arity() const override { return n_; }
  bool eval(const BitPoint&) const override { return value_; }
  double cond_mean(const PartialPoint&) const override { return value_ ? 1.0 : 0.0; }
  double derivative_at(int, const PartialPoint&) const override { return 0.0; }
  Constancy constancy(const PartialPoint&) const override {
    return value_ ? Constancy::kOne : Constancy::kZero;
  }
  double influence_flip(int) const override { return 0.0; }
  std::optional<bool> known_monotone() const override { return true; }
  std::string describe() const override {
    return "const:n=" + std::to_string(n_) + ",v=" + (value_ ? "1" : "0");
  }

 private:
  int n_;
  bool value_;
};

// Table with each entry 1 independently with probability `bias`, derived from `seed`.
TruthTable random_table(int n, std::uint64_t seed, double bias = 0.5);

}  // namespace boolrr
