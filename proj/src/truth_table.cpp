#include "boolrr/truth_table.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace boolrr {

TruthTable::TruthTable(int n, bool fill) : n_(n) {
  if (n < 0 || n > kMaxTableArity) {
    throw std::invalid_argument("TruthTable: arity " + std::to_string(n) + " outside [0, " +
                                std::to_string(kMaxTableArity) + "]");
  }
  const std::uint64_t bits = size();
  words_.assign((bits + 63) / 64, fill ? ~std::uint64_t{0} : 0);
  if (fill) {
    if (bits % 64 != 0) words_.back() = (std::uint64_t{1} << (bits % 64)) - 1;
    ones_ = bits;
  }
}

void TruthTable::set(std::uint64_t k, bool v) {
  const std::uint64_t m = std::uint64_t{1} << (k & 63);
  const bool old = (words_[k >> 6] & m) != 0;
  if (old == v) return;
  if (v) {
    words_[k >> 6] |= m;
    ++ones_;
  } else {
    words_[k >> 6] &= ~m;
    --ones_;
  }
}

std::vector<double> TruthTable::as_reals() const {
  std::vector<double> out(size());
  for (std::uint64_t k = 0; k < size(); ++k) out[k] = get(k) ? 1.0 : 0.0;
  return out;
}

std::string TruthTable::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::uint64_t chars = (size() + 3) / 4;
  std::string s(chars, '0');
  for (std::uint64_t j = 0; j < chars; ++j) {
    unsigned nibble = 0;
    for (unsigned b = 0; b < 4; ++b) {
      const std::uint64_t k = 4 * j + b;
      if (k < size() && get(k)) nibble |= 1U << b;
    }
    s[j] = kDigits[nibble];
  }
  return s;
}

TruthTable TruthTable::from_hex(int n, std::string_view hex) {
  TruthTable t(n);
  const std::uint64_t chars = (t.size() + 3) / 4;
  if (hex.size() != chars) {
    throw std::invalid_argument("truth table hex: expected " + std::to_string(chars) +
                                " hex digits for n=" + std::to_string(n) + ", got " +
                                std::to_string(hex.size()));
  }
  for (std::uint64_t j = 0; j < chars; ++j) {
    const char c = hex[j];
    unsigned nibble;
    if (c >= '0' && c <= '9') {
      nibble = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      nibble = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      nibble = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw std::invalid_argument(std::string("truth table hex: bad digit '") + c + "'");
    }
    for (unsigned b = 0; b < 4; ++b) {
      const std::uint64_t k = 4 * j + b;
      if ((nibble >> b) & 1U) {
        if (k >= t.size()) throw std::invalid_argument("truth table hex: bits set past 2^n");
        t.set(k, true);
      }
    }
  }
  return t;
}

TruthTable read_truth_table(std::istream& in) {
  std::string header;
  std::string body;
  if (!std::getline(in, header) || header.rfind("n=", 0) != 0) {
    throw std::invalid_argument("truth table file: first line must be n=<int>");
  }
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(header.substr(2), &used);
    if (used != header.size() - 2) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("truth table file: bad arity line '" + header + "'");
  }
  if (!std::getline(in, body)) throw std::invalid_argument("truth table file: missing hex line");
  while (!body.empty() && (body.back() == '\r' || body.back() == ' ')) body.pop_back();
  return TruthTable::from_hex(n, body);
}

TruthTable read_truth_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open truth table file " + path.string());
  return read_truth_table(in);
}

void write_truth_table(std::ostream& out, const TruthTable& t) {
  out << "n=" << t.arity() << '\n' << t.to_hex() << '\n';
}

void write_truth_table(const std::filesystem::path& path, const TruthTable& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write truth table file " + path.string());
  write_truth_table(out, t);
}

}  // namespace boolrr
