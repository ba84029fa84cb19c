#pragma once

#include "bpl/blockmat.hpp"
#include "bpl/error.hpp"
#include "bpl/log_value.hpp"
#include "bpl/matrix.hpp"

#include <vector>

namespace bpl {

struct SinkhornResult {
    std::vector<double> d1;  // row scalers
    std::vector<double> d2;  // column scalers
    DenseMatrix U;           // diag(d1) A diag(d2)
    int iterations = 0;
    double residual = 0.0;   // max |row or column sum - 1|
};

inline constexpr double kSinkhornTol = 1e-13;
inline constexpr int kSinkhornMaxIter = 100000;

// Alternating row/column normalization of a strictly positive matrix. The
// free common scalar is fixed by prod d1 = prod d2. Throws
// NotConverged<SinkhornResult> at the iteration cap.
SinkhornResult sinkhorn_scale(const DenseMatrix& A, double tol = kSinkhornTol, int max_iter = kSinkhornMaxIter);

// Block scalers: vright_i = 1 / sum_j l_j b_ij vleft_j and
// vleft_j = 1 / sum_i k_i b_ij vright_i, iterated on the m x m system.
struct BlockScaling {
    std::vector<double> vright;
    std::vector<double> vleft;
    int iterations = 0;
    double residual = 0.0;  // max over the 2m equations of |V * sum - 1|
};

BlockScaling block_fixed_point(const BlockSpec& spec, double tol = kSinkhornTol, int max_iter = kSinkhornMaxIter);

// Starts from a caller-supplied point. Used to probe for other solutions.
BlockScaling block_fixed_point_from(const BlockSpec& spec, std::vector<double> vright, std::vector<double> vleft,
                                    double tol = kSinkhornTol, int max_iter = kSinkhornMaxIter);

// Residual of the 2m scaler equations at an arbitrary point.
double block_equation_residual(const BlockSpec& spec, const std::vector<double>& vright,
                               const std::vector<double>& vleft);

struct SaddlePoint {
    std::vector<double> vright;
    std::vector<double> vleft;
    std::vector<double> tstar;  // k_i vright_i^2
    std::vector<double> ustar;  // l_j vleft_j^2
    double residual = 0.0;
    int iterations = 0;
};

SaddlePoint saddle_point(const BlockSpec& spec, double tol = kSinkhornTol, int max_iter = kSinkhornMaxIter);

// e^{-n} prod_i (1/d1_i) prod_j (1/d2_j).
LogValue scaled_sinkhorn_permanent(const DenseMatrix& A, double tol = kSinkhornTol, int max_iter = kSinkhornMaxIter);
LogValue scaled_sinkhorn_permanent(const SinkhornResult& s);

// Same quantity from the block scalers, without expanding the matrix.
LogValue scaled_sinkhorn_permanent_block(const BlockSpec& spec, const BlockScaling& s);

}  // namespace bpl
