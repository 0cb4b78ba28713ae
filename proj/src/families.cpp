#include "boolrr/families.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "boolrr/rng.hpp"

namespace boolrr {

namespace {

double pow2(int e) { return std::ldexp(1.0, e); }

void check_arity(int n, const char* who) {
  if (n < 1) throw SpecError(std::string(who) + ": n must be >= 1");
}

void check_point(int n, const PartialPoint& x, const char* who) { require_same_arity(n, x.arity(), who); }

}  // namespace

double binomial_half_cdf(int k, long long m) {
  if (m < 0) return 0.0;
  if (m >= k) return 1.0;
  if (k <= 62) {
    std::uint64_t c = 1;
    std::uint64_t sum = 0;
    for (long long j = 0; j <= m; ++j) {
      sum += c;
      c = c * static_cast<std::uint64_t>(k - j) / static_cast<std::uint64_t>(j + 1);
    }
    return std::ldexp(static_cast<double>(sum), -k);
  }
  // Sum the shorter side with a long double pmf recurrence.
  const bool lower = 2 * m < k;
  long double pmf = std::ldexp(1.0L, -k);
  long double acc = 0.0L;
  if (lower) {
    for (long long j = 0; j <= m; ++j) {
      acc += pmf;
      pmf = pmf * static_cast<long double>(k - j) / static_cast<long double>(j + 1);
    }
    return static_cast<double>(acc);
  }
  // upper tail: j = k down to m+1, pmf(k) = 2^-k
  for (long long j = k; j > m; --j) {
    acc += pmf;
    pmf = pmf * static_cast<long double>(j) / static_cast<long double>(k - j + 1);
  }
  return static_cast<double>(1.0L - acc);
}

int tribes_arity(int w) {
  if (w < 1) throw SpecError("tribes: w must be >= 1");
  if (w > 30) throw SpecError("tribes: w too large");
  const double clause = 1.0 - pow2(-w);
  int c = 1;
  double mean = clause;
  while (mean > 0.5) {
    ++c;
    mean *= clause;
  }
  return c * w;
}

// ---------------------------------------------------------------------------
// Tribes

TribesFunction::TribesFunction(int w, int n) : w_(w), n_(n) {
  if (w < 1) throw SpecError("tribes: w must be >= 1");
  if (n < w || n % w != 0) throw SpecError("tribes: n must be a positive multiple of w");
}

std::string TribesFunction::describe() const {
  return "tribes:w=" + std::to_string(w_) + ",n=" + std::to_string(n_);
}

bool TribesFunction::eval(const BitPoint& x) const {
  require_same_arity(n_, x.arity(), "tribes eval");
  for (int j = 0; j < clauses(); ++j) {
    bool sat = false;
    for (int i = j * w_; i < (j + 1) * w_ && !sat; ++i) sat = x.bit(i);
    if (!sat) return false;
  }
  return true;
}

TribesFunction::ClauseState TribesFunction::clause_state(int j, const PartialPoint& x) const {
  ClauseState s;
  for (int i = j * w_; i < (j + 1) * w_; ++i) {
    const int v = x.value(i);
    if (v == 0) {
      ++s.alive;
    } else if (v < 0) {
      ++s.fixed_true;
    }
  }
  return s;
}

double TribesFunction::clause_mean(ClauseState s) {
  if (s.fixed_true > 0) return 1.0;
  return 1.0 - pow2(-s.alive);
}

double TribesFunction::cond_mean(const PartialPoint& x) const {
  check_point(n_, x, "tribes cond_mean");
  double m = 1.0;
  for (int j = 0; j < clauses(); ++j) m *= clause_mean(clause_state(j, x));
  return m;
}

double TribesFunction::derivative_at(int i, const PartialPoint& x) const {
  check_point(n_, x, "tribes derivative");
  const int own = i / w_;
  double others = 1.0;
  for (int j = 0; j < clauses(); ++j) {
    if (j != own) others *= clause_mean(clause_state(j, x));
  }
  ClauseState s = clause_state(own, x);
  const int v = x.value(i);
  if (v == 0) {
    --s.alive;
  } else if (v < 0) {
    --s.fixed_true;
  }
  if (s.fixed_true > 0) return 0.0;
  return -0.5 * pow2(-s.alive) * others;
}

double TribesFunction::max_abs_derivative(const PartialPoint& x, bool alive_only) const {
  check_point(n_, x, "tribes max derivative");
  const int c = clauses();
  std::vector<ClauseState> st(static_cast<std::size_t>(c));
  std::vector<double> prefix(static_cast<std::size_t>(c) + 1, 1.0);
  std::vector<double> suffix(static_cast<std::size_t>(c) + 1, 1.0);
  for (int j = 0; j < c; ++j) st[j] = clause_state(j, x);
  for (int j = 0; j < c; ++j) prefix[j + 1] = prefix[j] * clause_mean(st[j]);
  for (int j = c - 1; j >= 0; --j) suffix[j] = suffix[j + 1] * clause_mean(st[j]);
  double best = 0.0;
  for (int i = 0; i < n_; ++i) {
    const int v = x.value(i);
    if (alive_only && v != 0) continue;
    const int j = i / w_;
    ClauseState s = st[j];
    if (v == 0) {
      --s.alive;
    } else if (v < 0) {
      --s.fixed_true;
    }
    if (s.fixed_true > 0) continue;
    best = std::max(best, 0.5 * pow2(-s.alive) * prefix[j] * suffix[j + 1]);
  }
  return best;
}

Constancy TribesFunction::constancy(const PartialPoint& x) const {
  check_point(n_, x, "tribes constancy");
  bool all_sat = true;
  for (int j = 0; j < clauses(); ++j) {
    const ClauseState s = clause_state(j, x);
    if (s.fixed_true == 0 && s.alive == 0) return Constancy::kZero;
    if (s.fixed_true == 0) all_sat = false;
  }
  return all_sat ? Constancy::kOne : Constancy::kNonconstant;
}

double TribesFunction::influence_flip(int) const {
  return pow2(-(w_ - 1)) * std::pow(1.0 - pow2(-w_), clauses() - 1);
}

// ---------------------------------------------------------------------------
// Majority

MajorityFunction::MajorityFunction(int n, bool allow_even) : n_(n) {
  check_arity(n, "maj");
  if (n % 2 == 0 && !allow_even) throw SpecError("maj: even n=" + std::to_string(n) + " rejected (pass even=1)");
}

bool MajorityFunction::eval(const BitPoint& x) const {
  require_same_arity(n_, x.arity(), "maj eval");
  return n_ - 2 * x.minus_count() <= 0;
}

double MajorityFunction::tail(long long s, int k) {
  // s + 2J - k <= 0  <=>  J <= floor((k - s) / 2)
  const long long num = static_cast<long long>(k) - s;
  const long long m = num >= 0 ? num / 2 : -((-num + 1) / 2);
  return binomial_half_cdf(k, m);
}

double MajorityFunction::cond_mean(const PartialPoint& x) const {
  check_point(n_, x, "maj cond_mean");
  long long s = 0;
  int k = 0;
  for (int i = 0; i < n_; ++i) {
    const int v = x.value(i);
    s += v;
    k += v == 0 ? 1 : 0;
  }
  return tail(s, k);
}

double MajorityFunction::derivative_from(long long others_sum, int others_alive) const {
  return 0.5 * (tail(others_sum + 1, others_alive) - tail(others_sum - 1, others_alive));
}

double MajorityFunction::derivative_at(int i, const PartialPoint& x) const {
  check_point(n_, x, "maj derivative");
  long long s = 0;
  int k = 0;
  for (int j = 0; j < n_; ++j) {
    if (j == i) continue;
    const int v = x.value(j);
    s += v;
    k += v == 0 ? 1 : 0;
  }
  return derivative_from(s, k);
}

double MajorityFunction::max_abs_derivative(const PartialPoint& x, bool alive_only) const {
  check_point(n_, x, "maj max derivative");
  long long s = 0;
  int k = 0;
  bool has_plus = false;
  bool has_minus = false;
  for (int j = 0; j < n_; ++j) {
    const int v = x.value(j);
    s += v;
    k += v == 0 ? 1 : 0;
    has_plus = has_plus || v > 0;
    has_minus = has_minus || v < 0;
  }
  double best = 0.0;
  if (k > 0) best = std::abs(derivative_from(s, k - 1));
  if (!alive_only) {
    if (has_plus) best = std::max(best, std::abs(derivative_from(s - 1, k)));
    if (has_minus) best = std::max(best, std::abs(derivative_from(s + 1, k)));
  }
  return best;
}

Constancy MajorityFunction::constancy(const PartialPoint& x) const {
  check_point(n_, x, "maj constancy");
  long long s = 0;
  int k = 0;
  for (int i = 0; i < n_; ++i) {
    const int v = x.value(i);
    s += v;
    k += v == 0 ? 1 : 0;
  }
  if (s + k <= 0) return Constancy::kOne;
  if (s - k > 0) return Constancy::kZero;
  return Constancy::kNonconstant;
}

double MajorityFunction::influence_flip(int) const { return 2.0 * std::abs(derivative_from(0, n_ - 1)); }

// ---------------------------------------------------------------------------
// Parity, AND, OR, dictator

ParityFunction::ParityFunction(int n) : n_(n) { check_arity(n, "parity"); }

bool ParityFunction::eval(const BitPoint& x) const {
  require_same_arity(n_, x.arity(), "parity eval");
  return (x.minus_count() & 1) != 0;
}

double ParityFunction::cond_mean(const PartialPoint& x) const {
  check_point(n_, x, "parity cond_mean");
  int odd = 0;
  for (int i = 0; i < n_; ++i) {
    const int v = x.value(i);
    if (v == 0) return 0.5;
    odd ^= v < 0 ? 1 : 0;
  }
  return odd;
}

double ParityFunction::derivative_at(int i, const PartialPoint& x) const {
  check_point(n_, x, "parity derivative");
  int odd = 0;
  for (int j = 0; j < n_; ++j) {
    if (j == i) continue;
    const int v = x.value(j);
    if (v == 0) return 0.0;
    odd ^= v < 0 ? 1 : 0;
  }
  return odd ? 0.5 : -0.5;
}

Constancy ParityFunction::constancy(const PartialPoint& x) const {
  if (x.alive_count() > 0) return Constancy::kNonconstant;
  return cond_mean(x) == 1.0 ? Constancy::kOne : Constancy::kZero;
}

AndFunction::AndFunction(int n) : n_(n) { check_arity(n, "and"); }

bool AndFunction::eval(const BitPoint& x) const {
  require_same_arity(n_, x.arity(), "and eval");
  return x.minus_count() == n_;
}

double AndFunction::cond_mean(const PartialPoint& x) const {
  check_point(n_, x, "and cond_mean");
  int alive = 0;
  for (int i = 0; i < n_; ++i) {
    const int v = x.value(i);
    if (v > 0) return 0.0;
    alive += v == 0 ? 1 : 0;
  }
  return pow2(-alive);
}

double AndFunction::derivative_at(int i, const PartialPoint& x) const {
  check_point(n_, x, "and derivative");
  int alive = 0;
  for (int j = 0; j < n_; ++j) {
    if (j == i) continue;
    const int v = x.value(j);
    if (v > 0) return 0.0;
    alive += v == 0 ? 1 : 0;
  }
  return -0.5 * pow2(-alive);
}

Constancy AndFunction::constancy(const PartialPoint& x) const {
  int alive = 0;
  for (int i = 0; i < n_; ++i) {
    const int v = x.value(i);
    if (v > 0) return Constancy::kZero;
    alive += v == 0 ? 1 : 0;
  }
  return alive == 0 ? Constancy::kOne : Constancy::kNonconstant;
}

double AndFunction::influence_flip(int) const { return pow2(-(n_ - 1)); }

OrFunction::OrFunction(int n) : n_(n) { check_arity(n, "or"); }

bool OrFunction::eval(const BitPoint& x) const {
  require_same_arity(n_, x.arity(), "or eval");
  return x.minus_count() > 0;
}

double OrFunction::cond_mean(const PartialPoint& x) const {
  check_point(n_, x, "or cond_mean");
  int alive = 0;
  for (int i = 0; i < n_; ++i) {
    const int v = x.value(i);
    if (v < 0) return 1.0;
    alive += v == 0 ? 1 : 0;
  }
  return 1.0 - pow2(-alive);
}

double OrFunction::derivative_at(int i, const PartialPoint& x) const {
  check_point(n_, x, "or derivative");
  int alive = 0;
  for (int j = 0; j < n_; ++j) {
    if (j == i) continue;
    const int v = x.value(j);
    if (v < 0) return 0.0;
    alive += v == 0 ? 1 : 0;
  }
  return -0.5 * pow2(-alive);
}

Constancy OrFunction::constancy(const PartialPoint& x) const {
  int alive = 0;
  for (int i = 0; i < n_; ++i) {
    const int v = x.value(i);
    if (v < 0) return Constancy::kOne;
    alive += v == 0 ? 1 : 0;
  }
  return alive == 0 ? Constancy::kZero : Constancy::kNonconstant;
}

double OrFunction::influence_flip(int) const { return pow2(-(n_ - 1)); }

DictatorFunction::DictatorFunction(int n, int i) : n_(n), index_(i) {
  check_arity(n, "dict");
  if (i < 0 || i >= n) throw SpecError("dict: i must lie in [0, n)");
}

bool DictatorFunction::eval(const BitPoint& x) const {
  require_same_arity(n_, x.arity(), "dict eval");
  return x.bit(index_);
}

double DictatorFunction::cond_mean(const PartialPoint& x) const {
  check_point(n_, x, "dict cond_mean");
  const int v = x.value(index_);
  return v == 0 ? 0.5 : (v < 0 ? 1.0 : 0.0);
}

double DictatorFunction::derivative_at(int i, const PartialPoint&) const { return i == index_ ? -0.5 : 0.0; }

Constancy DictatorFunction::constancy(const PartialPoint& x) const {
  const int v = x.value(index_);
  if (v == 0) return Constancy::kNonconstant;
  return v < 0 ? Constancy::kOne : Constancy::kZero;
}

// ---------------------------------------------------------------------------

TruthTable random_table(int n, std::uint64_t seed, double bias) {
  if (!(bias >= 0.0 && bias <= 1.0)) throw SpecError("random: bias must lie in [0,1]");
  Rng rng = make_stream(seed, {0x7461626cULL, static_cast<std::uint64_t>(n)});
  TruthTable t(n);
  for (std::uint64_t k = 0; k < t.size(); ++k) {
    if (bernoulli(rng, bias)) t.set(k, true);
  }
  return t;
}

// ---------------------------------------------------------------------------
// FunctionSpec grammar

namespace {

long long parse_int(const std::string& key, const std::string& val) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(val, &used);
    if (used != val.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw SpecError("bad integer for '" + key + "': '" + val + "'");
  }
}

double parse_real(const std::string& key, const std::string& val) {
  try {
    std::size_t used = 0;
    const double v = std::stod(val, &used);
    if (used != val.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw SpecError("bad number for '" + key + "': '" + val + "'");
  }
}

}  // namespace

FunctionSpec parse_spec(std::string_view text) {
  FunctionSpec spec;
  spec.text = std::string(text);
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  std::map<std::string, std::string> kv;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw SpecError("malformed parameter '" + std::string(item) + "' in '" + spec.text + "'");
      }
      const std::string key(item.substr(0, eq));
      if (kv.count(key) != 0) throw SpecError("duplicate key '" + key + "'");
      kv[key] = std::string(item.substr(eq + 1));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
      if (rest.empty()) throw SpecError("trailing ',' in '" + spec.text + "'");
    }
  }

  auto allow = [&](std::set<std::string> keys, std::set<std::string> required) {
    for (const auto& [k, v] : kv) {
      if (keys.count(k) == 0) throw SpecError("unknown key '" + k + "' for family '" + name + "'");
    }
    for (const auto& k : required) {
      if (kv.count(k) == 0) throw SpecError("family '" + name + "' requires key '" + k + "'");
    }
  };
  auto get_int = [&](const std::string& k) { return static_cast<int>(parse_int(k, kv.at(k))); };

  if (name == "table") {
    spec.kind = FamilyKind::kTable;
    allow({"path"}, {"path"});
    spec.path = kv.at("path");
  } else if (name == "tribes") {
    spec.kind = FamilyKind::kTribes;
    allow({"w", "n"}, {"w"});
    spec.w = get_int("w");
    if (spec.w < 1) throw SpecError("tribes: w must be >= 1");
    spec.n = kv.count("n") ? get_int("n") : tribes_arity(spec.w);
    if (spec.n < spec.w || spec.n % spec.w != 0) throw SpecError("tribes: n must be a positive multiple of w");
  } else if (name == "maj" || name == "majority") {
    spec.kind = FamilyKind::kMajority;
    allow({"n", "even"}, {"n"});
    spec.n = get_int("n");
    spec.allow_even = kv.count("even") ? get_int("even") != 0 : false;
    if (spec.n < 1) throw SpecError("maj: n must be >= 1");
    if (spec.n % 2 == 0 && !spec.allow_even) {
      throw SpecError("maj: even n=" + std::to_string(spec.n) + " rejected (pass even=1)");
    }
  } else if (name == "parity" || name == "and" || name == "or") {
    spec.kind = name == "parity" ? FamilyKind::kParity : (name == "and" ? FamilyKind::kAnd : FamilyKind::kOr);
    allow({"n"}, {"n"});
    spec.n = get_int("n");
    if (spec.n < 1) throw SpecError(name + ": n must be >= 1");
  } else if (name == "dict" || name == "dictator") {
    spec.kind = FamilyKind::kDictator;
    allow({"n", "i"}, {"n"});
    spec.n = get_int("n");
    spec.index = kv.count("i") ? get_int("i") : 0;
    if (spec.n < 1 || spec.index < 0 || spec.index >= spec.n) throw SpecError("dict: need n >= 1 and 0 <= i < n");
  } else if (name == "random") {
    spec.kind = FamilyKind::kRandom;
    allow({"n", "seed", "bias"}, {"n"});
    spec.n = get_int("n");
    spec.seed = kv.count("seed") ? static_cast<std::uint64_t>(parse_int("seed", kv.at("seed"))) : 0;
    spec.bias = kv.count("bias") ? parse_real("bias", kv.at("bias")) : 0.5;
    if (spec.n < 0 || spec.n > kMaxTableArity) throw SpecError("random: n must lie in [0, 24]");
    if (!(spec.bias >= 0.0 && spec.bias <= 1.0)) throw SpecError("random: bias must lie in [0,1]");
  } else if (name == "const") {
    spec.kind = FamilyKind::kConstant;
    allow({"n", "v"}, {"n"});
    spec.n = get_int("n");
    spec.value = kv.count("v") ? get_int("v") != 0 : false;
    if (spec.n < 0) throw SpecError("const: n must be >= 0");
  } else {
    throw SpecError("unknown function family '" + name + "'");
  }
  return spec;
}

FunctionPtr make_family(const FunctionSpec& spec) {
  switch (spec.kind) {
    case FamilyKind::kTable:
      return make_table_function(read_truth_table(spec.path), spec.text.empty() ? "table" : spec.text);
    case FamilyKind::kTribes:
      return std::make_shared<TribesFunction>(spec.w, spec.n > 0 ? spec.n : tribes_arity(spec.w));
    case FamilyKind::kMajority:
      return std::make_shared<MajorityFunction>(spec.n, spec.allow_even);
    case FamilyKind::kParity:
      return std::make_shared<ParityFunction>(spec.n);
    case FamilyKind::kAnd:
      return std::make_shared<AndFunction>(spec.n);
    case FamilyKind::kOr:
      return std::make_shared<OrFunction>(spec.n);
    case FamilyKind::kDictator:
      return std::make_shared<DictatorFunction>(spec.n, spec.index);
    case FamilyKind::kRandom:
      return make_table_function(random_table(spec.n, spec.seed, spec.bias),
                                 spec.text.empty() ? "random" : spec.text);
    case FamilyKind::kConstant:
      return std::make_shared<ConstantFunction>(spec.n, spec.value);
  }
  throw SpecError("unhandled family");
}

}  // namespace boolrr
