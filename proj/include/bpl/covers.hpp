#pragma once

#include "bpl/exactperm.hpp"
#include "bpl/log_value.hpp"
#include "bpl/matrix.hpp"

#include <cstdint>
#include <vector>

namespace bpl {

// One degree-M cover of an n x n matrix: an M-element permutation per cell,
// stored row-major.
struct CoverConfig {
    int M = 1;
    int n = 0;
    std::vector<Permutation> perms;

    const Permutation& at(int i, int j) const { return perms[static_cast<std::size_t>(i) * n + j]; }
    // Throws DomainError if a cell is not an M-permutation or the count is off.
    void validate() const;
};

// Mn x Mn matrix whose block (i,j) is a_ij times the permutation matrix of
// cell (i,j).
DenseMatrix lift(const DenseMatrix& A, const CoverConfig& cfg);

// Degree-2 Bethe permanent from the cycle-penalized pair sum
//   perm_B2(A)^2 = sum_{s1,s2} w(s1) w(s2) 2^{-c(s1 o s2^-1)}.
// n <= 6 uses the double loop over permutation pairs. n = 7, 8 regroups by
// tau = s1 o s2^-1, where sum_s w(tau o s) w(s) is the permanent of
// M_ij = a_ij a_{i,tau(j)}.
LogValue bethe2_pair_sum(const DenseMatrix& A, unsigned threads = 1);

// Both routes are exposed so tests can compare them on n <= 6.
LogValue bethe2_pair_sum_double_loop(const DenseMatrix& A);
LogValue bethe2_pair_sum_tau(const DenseMatrix& A, unsigned threads = 1);

// M-th root of the mean lifted permanent over every cover. Needs
// (M!)^{n^2} <= 2^20.
LogValue betheM_exhaustive(const DenseMatrix& A, int M, unsigned threads = 1);

struct SampledBethe {
    LogValue estimate;
    // Delta-method standard error of log(estimate). Zero for M = 1; infinite
    // when a single sample leaves the spread unknown.
    double stderr_log = 0.0;
};

// Monte-Carlo surrogate of betheM_exhaustive over uniform random covers.
// Cell c of sample s is shuffled with a stream keyed by (seed, c, s). M*n <= 24.
SampledBethe betheM_sampled(const DenseMatrix& A, int M, int samples, std::uint64_t seed, unsigned threads = 1);

// The cover drawn for sample s; exposed for reproducibility checks.
CoverConfig sample_cover(int n, int M, std::uint64_t seed, std::uint64_t sample);

}  // namespace bpl
