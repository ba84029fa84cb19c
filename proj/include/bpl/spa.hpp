#pragma once

#include "bpl/log_value.hpp"
#include "bpl/matrix.hpp"

namespace bpl {

struct SpaOptions {
    int max_iterations = 10000;
    double tolerance = 1e-12;
    double damping = 0.0;  // weight kept on the previous iterate, in [0, 1)
    // Throw NotConverged<BetheSolution> instead of returning converged=false.
    bool require_convergence = false;
};

struct BetheSolution {
    DenseMatrix gamma;
    double free_energy = 0.0;
    LogValue value;           // exp(-free_energy)
    int iterations = 0;
    bool converged = false;
    double step = 0.0;        // max |gamma change| on the last iteration
    // How far log(gamma (1 - gamma) / a) is from a sum of a row and a column
    // term, which is the first-order condition of the constrained minimum.
    double stationarity = 0.0;
};

// F(gamma) = sum_ij gamma ln(gamma / a) - (1 - gamma) ln(1 - gamma), with
// 0 ln 0 = 0. Throws DomainError when gamma is not doubly stochastic within
// `tol` or puts mass on a zero entry of A.
double bethe_free_energy(const DenseMatrix& A, const DenseMatrix& gamma, double tol = 1e-8);

// Minimizes F over doubly stochastic gamma. Stationarity reads
// gamma (1 - gamma) = a r_i c_j, so each step Sinkhorn-normalizes
// a / (1 - gamma). Starts from the Sinkhorn projection of A.
BetheSolution bethe_permanent(const DenseMatrix& A, const SpaOptions& opts = {});

// Same, started from a caller-supplied doubly stochastic point.
BetheSolution bethe_permanent_from(const DenseMatrix& A, DenseMatrix gamma, const SpaOptions& opts = {});

double bethe_stationarity(const DenseMatrix& A, const DenseMatrix& gamma);

}  // namespace bpl
