#pragma once

#include "bpl/matrix.hpp"

#include <vector>

namespace bpl {

struct Kernels {
    DenseMatrix W;  // B^T diag(t) B diag(u)
    DenseMatrix S;  // diag(u)^1/2 B^T diag(t) B diag(u)^1/2
    std::vector<double> t;
    std::vector<double> u;
};

// Throws InvalidSpec on nonpositive B, t or u.
Kernels build_kernels(const DenseMatrix& B, const std::vector<double>& t, const std::vector<double>& u);

struct SymmetricEigen {
    std::vector<double> values;  // descending
    DenseMatrix vectors;         // column c belongs to values[c]
};

// Cyclic Jacobi rotations. Each eigenvector is signed so that its first
// nonzero component is positive.
SymmetricEigen jacobi_eigen(const DenseMatrix& S);

struct Spectrum {
    std::vector<double> lambdas;  // descending
    std::vector<double> rhos;     // lambda_i / lambda_1 for i >= 2
    DenseMatrix vectors;
};

// Eigen-decomposition of S. Throws NumericalFailure when some
// |S x - lambda x| exceeds 1e-10 |S|. Roundoff negatives of size below
// 1e-12 lambda_1 are reported as 0.
Spectrum spectrum(const Kernels& kern);

// (d log lambda_1 / d log t_i ; d log lambda_1 / d log u_j), analytic from
// the Perron vector x of S:
//   t-part: t_i (B diag(u)^1/2 x)_i^2 / lambda_1,   u-part: x_j^2.
// Throws DegenerateSpectrum when lambda_1 - lambda_2 <= 1e-12 lambda_1.
std::vector<double> perron_log_gradient(const DenseMatrix& B, const std::vector<double>& t,
                                        const std::vector<double>& u);

double lambda1(const DenseMatrix& B, const std::vector<double>& t, const std::vector<double>& u);

struct RatioPrediction {
    double value = 0.0;
    // theorem1: some 1 - rho was below 1e-12 and got clamped.
    // smallrho: max rho >= 0.5, outside the range where the expansion is
    // trustworthy.
    bool flagged = false;
};

// (pi n / e)^{1/4} prod_i (e^{rho_i} (1 - rho_i))^{-1/4}. Throws DomainError
// if some rho is >= 1 or negative.
RatioPrediction predict_ratio_theorem1(int n, const std::vector<double>& rhos);

// (pi n / e)^{1/4} (1 + sum rho_i^2 / 8). From
// ln(e^rho (1 - rho)) = -rho^2/2 - rho^3/3 - ..., so the -1/4 power gives
// 1 + rho^2/8 + rho^3/12 + O(rho^4).
RatioPrediction predict_ratio_smallrho(int n, const std::vector<double>& rhos);

// All-one reference ratios: perm / perm_B2 ~ (pi n / e)^{1/4} and
// perm / perm_Bethe ~ sqrt(2 pi n / e).
double allone_ratio_bethe2(int n);
double allone_ratio_bethe(int n);

}  // namespace bpl
