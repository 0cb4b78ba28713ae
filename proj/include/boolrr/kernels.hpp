#pragma once

// Bit-level kernels over dense tables: Walsh-Hadamard butterflies and flip
// counts. Each has a serial reference and an OpenMP version; both produce
// identical results.

#include <cstdint>
#include <span>
#include <vector>

#include "boolrr/truth_table.hpp"

namespace boolrr::kernels {

// Unnormalized in-place butterfly: out[S] = sum_k in[k] * (-1)^{|S & k|}. Size must be a power of two.
void wht_serial(std::span<double> data);
void wht_parallel(std::span<double> data);

// Number of inputs k with t(k) != t(k xor e_i), for every coordinate i.
std::vector<std::uint64_t> flip_counts_serial(const TruthTable& t);
std::vector<std::uint64_t> flip_counts_parallel(const TruthTable& t);

// sum_{S contains i} coeffs[S]^2 for every coordinate i.
std::vector<double> spectral_weights_serial(std::span<const double> coeffs, int n);
std::vector<double> spectral_weights_parallel(std::span<const double> coeffs, int n);

}  // namespace boolrr::kernels
