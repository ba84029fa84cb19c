#include "bpl/spectral.hpp"

#include "bpl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace bpl {

Kernels build_kernels(const DenseMatrix& B, const std::vector<double>& t, const std::vector<double>& u) {
    if (!B.square()) throw Error(ErrorKind::InvalidSpec, "B must be square");
    const std::size_t m = B.n();
    if (t.size() != m || u.size() != m) throw Error(ErrorKind::InvalidSpec, "t and u must have length m");
    for (double x : B.data())
        if (!(x > 0)) throw Error(ErrorKind::InvalidSpec, "B must be positive");
    for (std::size_t i = 0; i < m; ++i)
        if (!(t[i] > 0) || !(u[i] > 0)) throw Error(ErrorKind::InvalidSpec, "t and u must be positive");

    // K = B^T diag(t) B
    DenseMatrix K(m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            double s = 0;
            for (std::size_t i = 0; i < m; ++i) s += B(i, a) * t[i] * B(i, b);
            K(a, b) = s;
        }
    Kernels out{DenseMatrix(m), DenseMatrix(m), t, u};
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            out.W(a, b) = K(a, b) * u[b];
            out.S(a, b) = std::sqrt(u[a]) * K(a, b) * std::sqrt(u[b]);
        }
    return out;
}

SymmetricEigen jacobi_eigen(const DenseMatrix& S0) {
    require_square(S0, "jacobi_eigen");
    const std::size_t m = S0.n();
    DenseMatrix A = S0;
    // Work on the exactly symmetric part.
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) A(i, j) = A(j, i) = 0.5 * (S0(i, j) + S0(j, i));
    DenseMatrix V = DenseMatrix::identity(m);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0, diag = 0;
        for (std::size_t i = 0; i < m; ++i) {
            diag += A(i, i) * A(i, i);
            for (std::size_t j = i + 1; j < m; ++j) off += A(i, j) * A(i, j);
        }
        if (off <= 1e-32 * diag || off == 0) break;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) {
                double apq = A(p, q);
                if (apq == 0) continue;
                double theta = (A(q, q) - A(p, p)) / (2 * apq);
                double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (std::size_t k = 0; k < m; ++k) {
                    double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return A(a, a) > A(b, b); });
    SymmetricEigen out{std::vector<double>(m), DenseMatrix(m)};
    for (std::size_t c = 0; c < m; ++c) {
        out.values[c] = A(order[c], order[c]);
        double sign = 1;
        for (std::size_t k = 0; k < m; ++k)
            if (std::abs(V(k, order[c])) > 1e-14) {
                sign = V(k, order[c]) < 0 ? -1 : 1;
                break;
            }
        for (std::size_t k = 0; k < m; ++k) out.vectors(k, c) = sign * V(k, order[c]);
    }
    return out;
}

Spectrum spectrum(const Kernels& kern) {
    const DenseMatrix& S = kern.S;
    const std::size_t m = S.n();
    SymmetricEigen e = jacobi_eigen(S);
    double norm = 0;
    for (double x : S.data()) norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < m; ++c) {
        double res = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double r = -e.values[c] * e.vectors(i, c);
            for (std::size_t j = 0; j < m; ++j) r += S(i, j) * e.vectors(j, c);
            res += r * r;
        }
        if (std::sqrt(res) > 1e-10 * norm) throw Error(ErrorKind::NumericalFailure, "eigensolver residual too large");
    }
    Spectrum sp;
    sp.lambdas = e.values;
    const double l1 = sp.lambdas[0];
    for (double& l : sp.lambdas)
        if (l < 0 && l > -1e-12 * l1) l = 0;
    for (std::size_t i = 1; i < m; ++i) sp.rhos.push_back(sp.lambdas[i] / l1);
    sp.vectors = std::move(e.vectors);
    return sp;
}

std::vector<double> perron_log_gradient(const DenseMatrix& B, const std::vector<double>& t,
                                        const std::vector<double>& u) {
    Kernels k = build_kernels(B, t, u);
    Spectrum sp = spectrum(k);
    const std::size_t m = B.n();
    const double l1 = sp.lambdas[0];
    if (m > 1 && sp.lambdas[0] - sp.lambdas[1] <= 1e-12 * l1)
        throw Error(ErrorKind::DegenerateSpectrum, "Perron gap below threshold");
    std::vector<double> g(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        double y = 0;
        for (std::size_t j = 0; j < m; ++j) y += B(i, j) * std::sqrt(u[j]) * sp.vectors(j, 0);
        g[i] = t[i] * y * y / l1;
    }
    for (std::size_t j = 0; j < m; ++j) g[m + j] = sp.vectors(j, 0) * sp.vectors(j, 0);
    return g;
}

double lambda1(const DenseMatrix& B, const std::vector<double>& t, const std::vector<double>& u) {
    return spectrum(build_kernels(B, t, u)).lambdas[0];
}

namespace {

double log_base_ratio(int n) { return 0.25 * std::log(std::numbers::pi * n / std::numbers::e); }

}  // namespace

RatioPrediction predict_ratio_theorem1(int n, const std::vector<double>& rhos) {
    if (n < 1) throw Error(ErrorKind::DomainError, "n must be positive");
    RatioPrediction out;
    double s = 0;
    for (double r : rhos) {
        if (!(r >= 0) || r >= 1) throw Error(ErrorKind::DomainError, "spectral ratios must lie in [0,1)");
        double gap = 1 - r;
        if (gap < 1e-12) {
            gap = 1e-12;
            out.flagged = true;
        }
        s += r + std::log(gap);
    }
    out.value = std::exp(log_base_ratio(n) - 0.25 * s);
    return out;
}

RatioPrediction predict_ratio_smallrho(int n, const std::vector<double>& rhos) {
    if (n < 1) throw Error(ErrorKind::DomainError, "n must be positive");
    RatioPrediction out;
    double s = 0;
    for (double r : rhos) {
        s += r * r;
        if (r >= 0.5) out.flagged = true;
    }
    out.value = std::exp(log_base_ratio(n)) * (1 + s / 8);
    return out;
}

double allone_ratio_bethe2(int n) { return std::exp(log_base_ratio(n)); }

double allone_ratio_bethe(int n) { return std::sqrt(2 * std::numbers::pi * n / std::numbers::e); }

}  // namespace bpl
