#pragma once

// Points of the Boolean cube and of the ternary cube {-1,0,1}^n.
//
// Sign convention used throughout the library: a stored bit b_i encodes the
// coordinate x_i = (-1)^{b_i}. Bit 1 is x_i = -1, which is logical "true"
// for AND/OR/tribes. Table index k of a point has bit i equal to b_i.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace boolrr {

class ArityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_same_arity(int a, int b, const char* what) {
  if (a != b) {
    throw ArityError(std::string(what) + ": arity mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

namespace detail {

inline std::size_t word_count(int n) { return (static_cast<std::size_t>(n) + 63) / 64; }

}  // namespace detail

// A point x in {-1,1}^n stored as n sign bits.
class BitPoint {
 public:
  BitPoint() = default;
  explicit BitPoint(int n) : n_(n), words_(detail::word_count(n), 0) {
    if (n < 0) throw std::invalid_argument("BitPoint: negative arity");
  }

  // Point whose bits are the binary digits of `index` (n <= 64).
  static BitPoint from_index(int n, std::uint64_t index) {
    BitPoint p(n);
    if (n > 64) throw std::invalid_argument("BitPoint::from_index: n > 64");
    if (n > 0) p.words_[0] = n == 64 ? index : (index & ((std::uint64_t{1} << n) - 1));
    return p;
  }

  int arity() const { return n_; }
  bool bit(int i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  int sign(int i) const { return bit(i) ? -1 : 1; }

  void set_bit(int i, bool b) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (b) {
      words_[i >> 6] |= m;
    } else {
      words_[i >> 6] &= ~m;
    }
  }
  void set_sign(int i, int s) { set_bit(i, s < 0); }
  void flip(int i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::uint64_t index() const {
    if (n_ > 64) throw std::invalid_argument("BitPoint::index: n > 64");
    return n_ == 0 ? 0 : words_[0];
  }

  // Number of coordinates equal to -1.
  int minus_count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const BitPoint&, const BitPoint&) = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

// A point of {-1,0,1}^n. Alive coordinates read as 0; fixed ones carry a sign.
class PartialPoint {
 public:
  PartialPoint() = default;
  explicit PartialPoint(int n)
      : n_(n), fixed_(detail::word_count(n), 0), signs_(detail::word_count(n), 0) {
    if (n < 0) throw std::invalid_argument("PartialPoint: negative arity");
  }

  static PartialPoint from_point(const BitPoint& x) {
    PartialPoint p(x.arity());
    for (int i = 0; i < x.arity(); ++i) p.assign(i, x.sign(i));
    return p;
  }

  // Build from masks (n <= 64). Sign bits outside `fixed_mask` are dropped.
  static PartialPoint from_masks(int n, std::uint64_t fixed_mask, std::uint64_t sign_mask) {
    if (n > 64) throw std::invalid_argument("PartialPoint::from_masks: n > 64");
    PartialPoint p(n);
    if (n == 0) return p;
    const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    p.fixed_[0] = fixed_mask & all;
    p.signs_[0] = sign_mask & fixed_mask & all;
    return p;
  }

  int arity() const { return n_; }
  bool is_fixed(int i) const { return (fixed_[i >> 6] >> (i & 63)) & 1U; }
  bool is_alive(int i) const { return !is_fixed(i); }

  // Ternary view: -1, 0 (alive) or +1.
  int value(int i) const {
    if (!is_fixed(i)) return 0;
    return ((signs_[i >> 6] >> (i & 63)) & 1U) ? -1 : 1;
  }

  // Fix an alive coordinate. Fixing a fixed coordinate is an error.
  void fix(int i, int sign) {
    if (is_fixed(i)) throw std::logic_error("PartialPoint::fix: coordinate already fixed");
    assign(i, sign);
  }

  // Set coordinate i to `sign` (+1/-1) whether or not it was fixed.
  void assign(int i, int sign) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    fixed_[i >> 6] |= m;
    if (sign < 0) {
      signs_[i >> 6] |= m;
    } else {
      signs_[i >> 6] &= ~m;
    }
  }

  void release(int i) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    fixed_[i >> 6] &= ~m;
    signs_[i >> 6] &= ~m;
  }

  PartialPoint with(int i, int sign) const {
    PartialPoint p = *this;
    p.assign(i, sign);
    return p;
  }
  PartialPoint without(int i) const {
    PartialPoint p = *this;
    p.release(i);
    return p;
  }

  int fixed_count() const {
    int c = 0;
    for (auto w : fixed_) c += std::popcount(w);
    return c;
  }
  int alive_count() const { return n_ - fixed_count(); }

  std::vector<int> alive_indices() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(alive_count()));
    for (int i = 0; i < n_; ++i) {
      if (is_alive(i)) out.push_back(i);
    }
    return out;
  }

  std::uint64_t fixed_mask() const {
    if (n_ > 64) throw std::invalid_argument("PartialPoint::fixed_mask: n > 64");
    return n_ == 0 ? 0 : fixed_[0];
  }
  std::uint64_t sign_mask() const {
    if (n_ > 64) throw std::invalid_argument("PartialPoint::sign_mask: n > 64");
    return n_ == 0 ? 0 : signs_[0];
  }

  // The completion of a fully fixed point.
  BitPoint to_point() const {
    if (alive_count() != 0) throw std::logic_error("PartialPoint::to_point: point has alive coordinates");
    BitPoint x(n_);
    for (int i = 0; i < n_; ++i) x.set_sign(i, value(i));
    return x;
  }

  friend bool operator==(const PartialPoint&, const PartialPoint&) = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> fixed_;
  std::vector<std::uint64_t> signs_;
};

}  // namespace boolrr
