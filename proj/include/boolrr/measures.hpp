#pragma once

// Sensitivity, block sensitivity, decision-tree depth and the OSSS inequality.

#include <cstdint>
#include <vector>

#include "boolrr/bits.hpp"
#include "boolrr/fourier.hpp"
#include "boolrr/function.hpp"
#include "boolrr/parallel.hpp"
#include "boolrr/stats.hpp"

namespace boolrr {

inline constexpr int kMaxBlockSearchArity = 14;
inline constexpr int kMaxDecisionTreeArity = 12;
inline constexpr int kMaxPartitionBlock = 20;

// Number of i with f(x) != f(x with coordinate i flipped).
int sensitivity(const BooleanFunction& f, const BitPoint& x);

// sum_i influence_flip(f, i) = E_x[s_f(x)].
double average_sensitivity(const BooleanFunction& f);

// Disjoint blocks (as coordinate masks), each of whose flips changes f at x.
struct BlockCertificate {
  BitPoint x;
  std::vector<std::uint64_t> blocks;

  // Re-evaluates every block and checks disjointness.
  bool verify(const BooleanFunction& f) const;
};

struct BlockSensitivity {
  int value = 0;
  BlockCertificate certificate;
  int minimal_blocks = 0;  // number of minimal sensitive blocks found
};

// Exact block sensitivity at x by max-packing of minimal sensitive blocks (n <= 14).
BlockSensitivity bs_exact(const BooleanFunction& f, const BitPoint& x);

// Equipartition of a permutation into M blocks; the first n mod M blocks get one extra element.
std::vector<std::uint64_t> equipartition(const std::vector<int>& perm, int M);

// Number of blocks B for which some nonempty T within B flips f at x (n <= 64).
int sensitive_block_count(const BooleanFunction& f, const BitPoint& x, const std::vector<std::uint64_t>& blocks);

struct BsPartitionResult {
  int M = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> histogram;  // count of trials with c sensitive blocks, c = 0..M
  Estimate mean_count;
  Estimate p_below_half;       // P[c < M/2]
  Estimate p_block_constant;   // P[f restricted to a random block is constant]
  double lhs = 0.0;            // p_below_half / 2
  double rhs = 0.0;            // p_block_constant
  bool double_counting_holds = false;  // lhs <= rhs + 3 sigma
};

BsPartitionResult bs_partition_estimate(const BooleanFunction& f, int M, std::int64_t trials, std::uint64_t seed,
                                        Exec exec = Exec::kParallel);

// Decision-tree depth by memoized recursion over partial points (n <= 12).
int dt_exact(const BooleanFunction& f);
// Unmemoized recursion with constancy by direct enumeration; an oracle for small n.
int dt_naive(const BooleanFunction& f);

struct OsssCheck {
  double max_influence = 0.0;
  int depth = 0;
  double lhs = 0.0;   // mINF * DT
  double rhs = 0.0;   // Var
  bool holds = false;
};

OsssCheck osss_check(const BooleanFunction& f, InfluenceKind kind = InfluenceKind::kFlip);

struct MonotoneInfluenceResult {
  double rho = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  int alive = 0;                  // ceil(rho n)
  bool monotone_verified = false; // exhaustive check ran (otherwise known by construction)
  double max_influence = 0.0;     // spectral mINF(f)
  double threshold = 0.0;         // mINF^{rho/30}
  double bound = 0.0;             // mINF^{rho/40} + exp(-rho n / 8)
  Estimate tail;                  // P[max_alive |d_i f(X)| >= threshold]
  Estimate tail_spectral;         // same event for the restricted spectral mINF
  Estimate mean_beta_star;
};

// X is the uniform process after n - ceil(rho n) steps, i.e. a restriction keeping ceil(rho n) alive.
MonotoneInfluenceResult monotone_restricted_influence(const BooleanFunction& f, double rho, std::int64_t trials,
                                                      std::uint64_t seed, Exec exec = Exec::kParallel);

}  // namespace boolrr
