#include "boolrr/kernels.hpp"

#include <bit>
#include <stdexcept>

#include <omp.h>

namespace boolrr::kernels {

namespace {

constexpr std::size_t kParallelThreshold = std::size_t{1} << 12;

void check_pow2(std::size_t size) {
  if (size == 0 || !std::has_single_bit(size)) throw std::invalid_argument("wht: size must be a power of two");
}

}  // namespace

void wht_serial(std::span<double> data) {
  const std::size_t size = data.size();
  check_pow2(size);
  for (std::size_t h = 1; h < size; h <<= 1) {
    for (std::size_t block = 0; block < size; block += 2 * h) {
      for (std::size_t j = block; j < block + h; ++j) {
        const double a = data[j];
        const double b = data[j + h];
        data[j] = a + b;
        data[j + h] = a - b;
      }
    }
  }
}

void wht_parallel(std::span<double> data) {
  const std::size_t size = data.size();
  check_pow2(size);
  if (size < kParallelThreshold) {
    wht_serial(data);
    return;
  }
  double* d = data.data();
  for (std::size_t h = 1; h < size; h <<= 1) {
    const auto blocks = static_cast<std::int64_t>(size / (2 * h));
    if (blocks >= 64) {
#pragma omp parallel for schedule(static)
      for (std::int64_t b = 0; b < blocks; ++b) {
        const std::size_t base = static_cast<std::size_t>(b) * 2 * h;
        for (std::size_t j = base; j < base + h; ++j) {
          const double x = d[j];
          const double y = d[j + h];
          d[j] = x + y;
          d[j + h] = x - y;
        }
      }
    } else {
      // few wide blocks: split each block's butterflies instead
      for (std::int64_t b = 0; b < blocks; ++b) {
        const std::size_t base = static_cast<std::size_t>(b) * 2 * h;
#pragma omp parallel for schedule(static)
        for (std::int64_t q = 0; q < static_cast<std::int64_t>(h); ++q) {
          const std::size_t j = base + static_cast<std::size_t>(q);
          const double x = d[j];
          const double y = d[j + h];
          d[j] = x + y;
          d[j + h] = x - y;
        }
      }
    }
  }
}

std::vector<std::uint64_t> flip_counts_serial(const TruthTable& t) {
  const int n = t.arity();
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    std::uint64_t c = 0;
    for (std::uint64_t k = 0; k < t.size(); ++k) {
      if ((k & bit) == 0 && t.get(k) != t.get(k | bit)) c += 2;
    }
    counts[i] = c;
  }
  return counts;
}

std::vector<std::uint64_t> flip_counts_parallel(const TruthTable& t) {
  const int n = t.arity();
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n), 0);
  const auto words = t.words();
  const auto nwords = static_cast<std::int64_t>(words.size());
  for (int i = 0; i < n; ++i) {
    std::uint64_t c = 0;
    if (i < 6) {
      // In-word partner: compare each word with itself shifted by 2^i.
      static constexpr std::uint64_t kLow[6] = {0x5555555555555555ULL, 0x3333333333333333ULL,
                                                0x0f0f0f0f0f0f0f0fULL, 0x00ff00ff00ff00ffULL,
                                                0x0000ffff0000ffffULL, 0x00000000ffffffffULL};
      const unsigned shift = 1U << i;
      const std::uint64_t valid = t.size() >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << t.size()) - 1);
#pragma omp parallel for reduction(+ : c) schedule(static)
      for (std::int64_t w = 0; w < nwords; ++w) {
        const std::uint64_t x = words[w] & valid;
        c += 2 * static_cast<std::uint64_t>(std::popcount((x ^ (x >> shift)) & kLow[i] & valid));
      }
    } else {
      const std::int64_t stride = std::int64_t{1} << (i - 6);
#pragma omp parallel for reduction(+ : c) schedule(static)
      for (std::int64_t w = 0; w < nwords; ++w) {
        if ((w & stride) == 0) c += 2 * static_cast<std::uint64_t>(std::popcount(words[w] ^ words[w | stride]));
      }
    }
    counts[i] = c;
  }
  return counts;
}

std::vector<double> spectral_weights_serial(std::span<const double> coeffs, int n) {
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (std::size_t s = 0; s < coeffs.size(); ++s) {
    const double sq = coeffs[s] * coeffs[s];
    for (int i = 0; i < n; ++i) {
      if ((s >> i) & 1U) out[i] += sq;
    }
  }
  return out;
}

std::vector<double> spectral_weights_parallel(std::span<const double> coeffs, int n) {
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  const auto size = static_cast<std::int64_t>(coeffs.size());
  // One coordinate per iteration keeps each accumulation in serial order.
#pragma omp parallel for schedule(dynamic, 1) if (size >= static_cast<std::int64_t>(kParallelThreshold))
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::int64_t s = 0; s < size; ++s) {
      if ((s >> i) & 1) acc += coeffs[s] * coeffs[s];
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace boolrr::kernels
