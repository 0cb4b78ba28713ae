#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "boolrr/bits.hpp"

namespace boolrr {

inline constexpr int kMaxTableArity = 24;

// Dense truth table of f : {-1,1}^n -> {0,1}. Entry k is f at BitPoint::from_index(n, k).
class TruthTable {
 public:
  TruthTable() = default;
  explicit TruthTable(int n, bool fill = false);

  // Build from a predicate over indices.
  template <class Pred>
  static TruthTable from_predicate(int n, Pred&& pred) {
    TruthTable t(n);
    for (std::uint64_t k = 0; k < t.size(); ++k) {
      if (pred(k)) t.set(k, true);
    }
    return t;
  }

  int arity() const { return n_; }
  std::uint64_t size() const { return std::uint64_t{1} << n_; }

  bool get(std::uint64_t k) const { return (words_[k >> 6] >> (k & 63)) & 1U; }
  void set(std::uint64_t k, bool v);

  std::uint64_t ones() const { return ones_; }
  double mean() const { return static_cast<double>(ones_) / static_cast<double>(size()); }

  std::span<const std::uint64_t> words() const { return words_; }

  // Values as 0/1 doubles, for transforms.
  std::vector<double> as_reals() const;

  // Lowercase hex, first character holding entries 0..3 (entry 4j+b in bit b of char j).
  std::string to_hex() const;
  static TruthTable from_hex(int n, std::string_view hex);

  friend bool operator==(const TruthTable& a, const TruthTable& b) {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }

 private:
  int n_ = 0;
  std::uint64_t ones_ = 0;
  std::vector<std::uint64_t> words_;
};

// Truth-table file: line 1 `n=<int>`, line 2 the hex string.
TruthTable read_truth_table(std::istream& in);
TruthTable read_truth_table(const std::filesystem::path& path);
void write_truth_table(std::ostream& out, const TruthTable& t);
void write_truth_table(const std::filesystem::path& path, const TruthTable& t);

}  // namespace boolrr
