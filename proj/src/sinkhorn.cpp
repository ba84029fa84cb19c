#include "bpl/sinkhorn.hpp"

#include <algorithm>
#include <cmath>

namespace bpl {

namespace {

double scaling_residual(const DenseMatrix& U) {
    const std::size_t n = U.n();
    double res = 0;
    std::vector<double> col(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0;
        for (std::size_t j = 0; j < n; ++j) {
            r += U(i, j);
            col[j] += U(i, j);
        }
        res = std::max(res, std::abs(r - 1));
    }
    for (double c : col) res = std::max(res, std::abs(c - 1));
    return res;
}

SinkhornResult finish(const DenseMatrix& A, std::vector<double> d1, std::vector<double> d2, int iterations) {
    const std::size_t n = A.n();
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += std::log(d1[i]) - std::log(d2[i]);
    const double shift = std::exp(-s / (2.0 * n));
    for (std::size_t i = 0; i < n; ++i) {
        d1[i] *= shift;
        d2[i] /= shift;
    }
    DenseMatrix U(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) U(i, j) = d1[i] * A(i, j) * d2[j];
    double res = scaling_residual(U);
    return {std::move(d1), std::move(d2), std::move(U), iterations, res};
}

}  // namespace

SinkhornResult sinkhorn_scale(const DenseMatrix& A, double tol, int max_iter) {
    require_square(A, "sinkhorn_scale");
    require_positive(A, "sinkhorn_scale");
    if (!(tol > 0)) throw Error(ErrorKind::DomainError, "tolerance must be positive");
    const std::size_t n = A.n();
    std::vector<double> d1(n, 1.0), d2(n, 1.0);
    for (int it = 1; it <= max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += A(i, j) * d2[j];
            d1[i] = 1.0 / s;
        }
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += d1[i] * A(i, j);
            d2[j] = 1.0 / s;
        }
        // Columns are exact after the column step, so only rows can be off.
        double res = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0;
            for (std::size_t j = 0; j < n; ++j) r += d1[i] * A(i, j) * d2[j];
            res = std::max(res, std::abs(r - 1));
        }
        if (res <= tol) return finish(A, d1, d2, it);
    }
    throw NotConverged<SinkhornResult>("sinkhorn_scale hit max_iter", finish(A, d1, d2, max_iter));
}

double block_equation_residual(const BlockSpec& spec, const std::vector<double>& x, const std::vector<double>& y) {
    const int m = spec.m();
    double res = 0;
    for (int i = 0; i < m; ++i) {
        double s = 0;
        for (int j = 0; j < m; ++j) s += spec.l()[j] * spec.b(i, j) * y[j];
        res = std::max(res, std::abs(x[i] * s - 1));
    }
    for (int j = 0; j < m; ++j) {
        double s = 0;
        for (int i = 0; i < m; ++i) s += spec.k()[i] * spec.b(i, j) * x[i];
        res = std::max(res, std::abs(y[j] * s - 1));
    }
    return res;
}

namespace {

// Enforces sum k_i log x_i = sum l_j log y_j.
void block_gauge(const BlockSpec& spec, std::vector<double>& x, std::vector<double>& y) {
    double s = 0;
    for (int i = 0; i < spec.m(); ++i) s += spec.k()[i] * std::log(x[i]) - spec.l()[i] * std::log(y[i]);
    const double shift = std::exp(-s / (2.0 * spec.n()));
    for (int i = 0; i < spec.m(); ++i) {
        x[i] *= shift;
        y[i] /= shift;
    }
}

}  // namespace

BlockScaling block_fixed_point_from(const BlockSpec& spec, std::vector<double> x, std::vector<double> y, double tol,
                                    int max_iter) {
    const int m = spec.m();
    if (static_cast<int>(x.size()) != m || static_cast<int>(y.size()) != m)
        throw Error(ErrorKind::DimensionMismatch, "block_fixed_point start point");
    if (!(tol > 0)) throw Error(ErrorKind::DomainError, "tolerance must be positive");
    for (int it = 1; it <= max_iter; ++it) {
        for (int i = 0; i < m; ++i) {
            double s = 0;
            for (int j = 0; j < m; ++j) s += spec.l()[j] * spec.b(i, j) * y[j];
            x[i] = 1.0 / s;
        }
        for (int j = 0; j < m; ++j) {
            double s = 0;
            for (int i = 0; i < m; ++i) s += spec.k()[i] * spec.b(i, j) * x[i];
            y[j] = 1.0 / s;
        }
        block_gauge(spec, x, y);
        double res = block_equation_residual(spec, x, y);
        if (res <= tol) return {x, y, it, res};
    }
    BlockScaling last{x, y, max_iter, block_equation_residual(spec, x, y)};
    throw NotConverged<BlockScaling>("block_fixed_point hit max_iter", last);
}

BlockScaling block_fixed_point(const BlockSpec& spec, double tol, int max_iter) {
    const double start = 1.0 / std::sqrt(static_cast<double>(spec.n()));
    return block_fixed_point_from(spec, std::vector<double>(spec.m(), start), std::vector<double>(spec.m(), start),
                                  tol, max_iter);
}

SaddlePoint saddle_point(const BlockSpec& spec, double tol, int max_iter) {
    BlockScaling s = block_fixed_point(spec, tol, max_iter);
    SaddlePoint w;
    w.vright = s.vright;
    w.vleft = s.vleft;
    for (int i = 0; i < spec.m(); ++i) {
        w.tstar.push_back(spec.k()[i] * s.vright[i] * s.vright[i]);
        w.ustar.push_back(spec.l()[i] * s.vleft[i] * s.vleft[i]);
    }
    w.residual = s.residual;
    w.iterations = s.iterations;
    return w;
}

LogValue scaled_sinkhorn_permanent(const SinkhornResult& s) {
    double l = -static_cast<double>(s.d1.size());
    for (double d : s.d1) l -= std::log(d);
    for (double d : s.d2) l -= std::log(d);
    return LogValue::from_log(l);
}

LogValue scaled_sinkhorn_permanent(const DenseMatrix& A, double tol, int max_iter) {
    return scaled_sinkhorn_permanent(sinkhorn_scale(A, tol, max_iter));
}

LogValue scaled_sinkhorn_permanent_block(const BlockSpec& spec, const BlockScaling& s) {
    double l = -static_cast<double>(spec.n());
    for (int i = 0; i < spec.m(); ++i) {
        l -= spec.k()[i] * std::log(s.vright[i]);
        l -= spec.l()[i] * std::log(s.vleft[i]);
    }
    return LogValue::from_log(l);
}

}  // namespace bpl
