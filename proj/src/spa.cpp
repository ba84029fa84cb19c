#include "bpl/spa.hpp"

#include "bpl/error.hpp"
#include "bpl/sinkhorn.hpp"

#include <algorithm>
#include <cmath>

namespace bpl {

double bethe_free_energy(const DenseMatrix& A, const DenseMatrix& gamma, double tol) {
    require_square(A, "bethe_free_energy");
    if (gamma.rows() != A.rows() || gamma.cols() != A.cols())
        throw Error(ErrorKind::DimensionMismatch, "gamma and A differ in size");
    const std::size_t n = A.n();
    std::vector<double> col(n, 0.0);
    double F = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < n; ++j) {
            double g = gamma(i, j);
            if (g < -tol || g > 1 + tol) throw Error(ErrorKind::DomainError, "gamma entry outside [0,1]");
            g = std::clamp(g, 0.0, 1.0);
            row += g;
            col[j] += g;
            if (g > 0) {
                if (!(A(i, j) > 0)) throw Error(ErrorKind::DomainError, "gamma puts mass on a zero entry");
                F += g * (std::log(g) - std::log(A(i, j)));
            }
            if (g < 1) F -= (1 - g) * std::log1p(-g);
        }
        if (std::abs(row - 1) > tol) throw Error(ErrorKind::DomainError, "gamma row sum differs from 1");
    }
    for (double c : col)
        if (std::abs(c - 1) > tol) throw Error(ErrorKind::DomainError, "gamma column sum differs from 1");
    return F;
}

double bethe_stationarity(const DenseMatrix& A, const DenseMatrix& gamma) {
    const std::size_t n = A.n();
    if (n < 2) return 0.0;
    DenseMatrix L(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double g = gamma(i, j);
            L(i, j) = std::log(g) + std::log1p(-g) - std::log(A(i, j));
        }
    double res = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) res = std::max(res, std::abs(L(i, j) - L(i, 0) - L(0, j) + L(0, 0)));
    return res;
}

namespace {

// Sinkhorn on G warm-started from (d1, d2); leaves the scaled matrix in U.
void rescale(const DenseMatrix& G, std::vector<double>& d1, std::vector<double>& d2, DenseMatrix& U, double tol) {
    const std::size_t n = G.n();
    for (int it = 0; it < kSinkhornMaxIter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += G(i, j) * d2[j];
            d1[i] = 1.0 / s;
        }
        double res = 0;
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += d1[i] * G(i, j);
            d2[j] = 1.0 / s;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0;
            for (std::size_t j = 0; j < n; ++j) r += d1[i] * G(i, j) * d2[j];
            res = std::max(res, std::abs(r - 1));
        }
        if (res <= tol) break;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) U(i, j) = d1[i] * G(i, j) * d2[j];
}

BetheSolution finish(const DenseMatrix& A, DenseMatrix gamma, int it, bool converged, double step) {
    BetheSolution s;
    s.free_energy = bethe_free_energy(A, gamma, 1e-8);
    s.value = LogValue::from_log(-s.free_energy);
    s.iterations = it;
    s.converged = converged;
    s.step = step;
    s.stationarity = bethe_stationarity(A, gamma);
    s.gamma = std::move(gamma);
    return s;
}

}  // namespace

BetheSolution bethe_permanent_from(const DenseMatrix& A, DenseMatrix gamma, const SpaOptions& opts) {
    require_square(A, "bethe_permanent");
    require_positive(A, "bethe_permanent");
    if (!(opts.tolerance > 0)) throw Error(ErrorKind::DomainError, "tolerance must be positive");
    if (!(opts.damping >= 0 && opts.damping < 1)) throw Error(ErrorKind::DomainError, "damping must be in [0,1)");
    const std::size_t n = A.n();
    if (n == 1) return finish(A, DenseMatrix(1, 1.0), 0, true, 0.0);

    const double inner_tol = std::max(1e-15, 0.01 * opts.tolerance);
    std::vector<double> d1(n, 1.0), d2(n, 1.0);
    DenseMatrix G(n), next(n);
    double step = 0;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) G(i, j) = A(i, j) / (1 - gamma(i, j));
        rescale(G, d1, d2, next, inner_tol);
        step = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double g = (1 - opts.damping) * next(i, j) + opts.damping * gamma(i, j);
                step = std::max(step, std::abs(g - gamma(i, j)));
                gamma(i, j) = g;
            }
        if (step <= opts.tolerance) return finish(A, std::move(gamma), it, true, step);
    }
    BetheSolution last = finish(A, std::move(gamma), opts.max_iterations, false, step);
    if (opts.require_convergence) throw NotConverged<BetheSolution>("bethe_permanent hit max_iterations", last);
    return last;
}

BetheSolution bethe_permanent(const DenseMatrix& A, const SpaOptions& opts) {
    require_square(A, "bethe_permanent");
    require_positive(A, "bethe_permanent");
    if (A.n() == 1) return bethe_permanent_from(A, DenseMatrix(1, 1.0), opts);
    return bethe_permanent_from(A, sinkhorn_scale(A).U, opts);
}

}  // namespace bpl
