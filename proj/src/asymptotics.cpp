#include "bpl/asymptotics.hpp"

#include "bpl/error.hpp"
#include "bpl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bpl {

namespace {

// d lambda_1 / d zeta at zeta = log(t; u).
std::vector<double> lambda_gradient(const DenseMatrix& B, const std::vector<double>& zeta) {
    const std::size_t m = B.n();
    std::vector<double> t(m), u(m);
    for (std::size_t i = 0; i < m; ++i) {
        t[i] = std::exp(zeta[i]);
        u[i] = std::exp(zeta[m + i]);
    }
    auto g = perron_log_gradient(B, t, u);
    const double l1 = lambda1(B, t, u);
    for (double& x : g) x *= l1;
    return g;
}

DenseMatrix difference_hessian(const DenseMatrix& B, const std::vector<double>& zeta, double h) {
    const std::size_t d = zeta.size();
    DenseMatrix H(d);
    for (std::size_t a = 0; a < d; ++a) {
        auto zp = zeta, zm = zeta;
        zp[a] += h;
        zm[a] -= h;
        auto gp = lambda_gradient(B, zp), gm = lambda_gradient(B, zm);
        // Q~ = 1 - lambda_1, hence the sign.
        for (std::size_t b = 0; b < d; ++b) H(b, a) = -(gp[b] - gm[b]) / (2 * h);
    }
    return H;
}

double norm2(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

DenseMatrix log_hessian_lambda1(const DenseMatrix& B, const std::vector<double>& t, const std::vector<double>& u,
                                double step) {
    if (!(step > 1e-6 && step < 1e-3)) throw Error(ErrorKind::DomainError, "Hessian step must lie in (1e-6, 1e-3)");
    const std::size_t m = B.n();
    if (t.size() != m || u.size() != m) throw Error(ErrorKind::DimensionMismatch, "saddle length differs from m");
    std::vector<double> zeta(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(t[i] > 0) || !(u[i] > 0)) throw Error(ErrorKind::DomainError, "saddle must be positive");
        zeta[i] = std::log(t[i]);
        zeta[m + i] = std::log(u[i]);
    }
    DenseMatrix Hh = difference_hessian(B, zeta, step);
    DenseMatrix Hh2 = difference_hessian(B, zeta, step / 2);
    const std::size_t d = 2 * m;
    DenseMatrix H(d);
    double defect = 0;
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) H(a, b) = (4 * Hh2(a, b) - Hh(a, b)) / 3;
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a + 1; b < d; ++b) {
            defect = std::max(defect, std::abs(H(a, b) - H(b, a)) / 2);
            H(a, b) = H(b, a) = 0.5 * (H(a, b) + H(b, a));
        }
    if (defect > 1e-6) throw Error(ErrorKind::NumericalFailure, "Hessian symmetrization defect too large");
    return H;
}

DenseMatrix log_hessian_lambda1(const DenseMatrix& B, const SaddlePoint& w, double step) {
    return log_hessian_lambda1(B, w.tstar, w.ustar, step);
}

TangentFrame tangent_frame(const std::vector<double>& v) {
    const std::size_t d = v.size();
    if (d == 0 || d % 2) throw Error(ErrorKind::DimensionMismatch, "gradient length must be 2m");
    const std::size_t m = d / 2;
    TangentFrame f;
    f.c.assign(d, 1.0);
    for (std::size_t i = m; i < d; ++i) f.c[i] = -1.0;
    f.v = v;

    std::vector<std::vector<double>> basis;
    auto add = [&](std::vector<double> x) {
        for (const auto& b : basis) {
            double p = dot(x, b);
            for (std::size_t i = 0; i < d; ++i) x[i] -= p * b[i];
        }
        // Second pass keeps the columns orthogonal to roundoff level.
        for (const auto& b : basis) {
            double p = dot(x, b);
            for (std::size_t i = 0; i < d; ++i) x[i] -= p * b[i];
        }
        return x;
    };
    auto cn = f.c;
    const double cnn = norm2(f.c);
    for (double& x : cn) x /= cnn;
    basis.push_back(cn);
    const double vn = norm2(v);
    if (!(vn > 0)) throw Error(ErrorKind::DegenerateFrame, "zero gradient");
    auto vr = add(v);
    if (norm2(vr) < 1e-8 * vn) throw Error(ErrorKind::DegenerateFrame, "gradient parallel to the invariance vector");
    const double vrn = norm2(vr);
    for (double& x : vr) x /= vrn;
    basis.push_back(vr);

    std::vector<std::vector<double>> cols;
    for (std::size_t e = 0; e < d && cols.size() < d - 2; ++e) {
        std::vector<double> x(d, 0.0);
        x[e] = 1.0;
        x = add(x);
        double nx = norm2(x);
        if (nx < 1e-8) continue;
        for (double& y : x) y /= nx;
        basis.push_back(x);
        cols.push_back(x);
    }
    f.V = DenseMatrix(d, d - 2, 0.0);
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t i = 0; i < d; ++i) f.V(i, c) = cols[c][i];
    return f;
}

TangentHessian tangent_hessian(const DenseMatrix& hessian, const TangentFrame& frame) {
    const std::size_t k = frame.V.cols();
    TangentHessian out;
    out.H = (frame.V.transpose() * hessian * frame.V).scaled(-1.0 / norm2(frame.v));
    if (k == 0) {
        out.det = 1.0;
        out.min_eig = std::numeric_limits<double>::infinity();
        return out;
    }
    SymmetricEigen e = jacobi_eigen(out.H);
    out.det = 1.0;
    for (double x : e.values) out.det *= x;
    out.min_eig = e.values.back();
    return out;
}

double acsv_log_coefficient(int m, double log_w_minus_r, double log_P, double alpha, double grad_norm, double r_norm,
                            double det_h) {
    if (!(det_h > 0)) throw Error(ErrorKind::NonPositiveHessian, "tangent Hessian determinant is not positive");
    const double eta = r_norm / grad_norm;
    return 0.5 * std::log(2.0 * m) + log_w_minus_r + log_P + (alpha - 1) * std::log(eta) - std::lgamma(alpha) -
           0.5 * ((2.0 * m - 2) * std::log(2 * std::numbers::pi * r_norm) + std::log(det_h)) - std::log(grad_norm);
}

namespace {

double r_norm_of(const BlockSpec& spec) {
    double s = 0;
    for (int x : spec.k()) s += double(x) * x;
    for (int x : spec.l()) s += double(x) * x;
    return std::sqrt(s);
}

// log P for the Gibbs (alpha = 1) and Bethe (alpha = 1/2) numerators at the
// saddle, where lambda_1 = 1 and lambda_i = rho_i.
double log_P_gibbs(const std::vector<double>& rhos) {
    double s = 0;
    for (double r : rhos) s -= std::log1p(-r);
    return s;
}

double log_P_bethe(const std::vector<double>& rhos) {
    double s = 0.5;
    for (double r : rhos) s += 0.5 * r - 0.5 * std::log1p(-r);
    return s;
}

struct SaddleGeometry {
    SaddlePoint w;
    double lambda1 = 0;
    std::vector<double> rhos;
    std::vector<double> v;
    TangentHessian th;
};

SaddleGeometry saddle_geometry(const BlockSpec& spec, const PredictOptions& opts) {
    SaddleGeometry g;
    g.w = saddle_point(spec);
    Spectrum sp = spectrum(build_kernels(spec.B(), g.w.tstar, g.w.ustar));
    g.lambda1 = sp.lambdas[0];
    g.rhos = sp.rhos;
    auto grad = perron_log_gradient(spec.B(), g.w.tstar, g.w.ustar);
    g.v.resize(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) g.v[i] = -opts.q_scale * g.lambda1 * grad[i];
    DenseMatrix H = log_hessian_lambda1(spec.B(), g.w, opts.hessian_step).scaled(opts.q_scale);
    g.th = tangent_hessian(H, tangent_frame(g.v));
    if (!(g.th.det > 0) || !(g.th.min_eig > 0))
        throw Error(ErrorKind::NonPositiveHessian, "tangent Hessian is not positive definite");
    return g;
}

}  // namespace

AsymptoticPrediction predict_Z(const BlockSpec& spec, const PredictOptions& opts) {
    if (!(opts.q_scale > 0)) throw Error(ErrorKind::DomainError, "q_scale must be positive");
    const int m = spec.m();
    SaddleGeometry g = saddle_geometry(spec, opts);
    AsymptoticPrediction out;
    out.det_h = g.th.det;
    out.min_hessian_eig = g.th.min_eig;
    out.grad_norm = norm2(g.v);
    out.r_norm = r_norm_of(spec);
    out.lambda1 = g.lambda1;
    out.rhos = g.rhos;
    double log_w = 0;
    for (int i = 0; i < m; ++i) log_w -= spec.k()[i] * std::log(g.w.tstar[i]) + spec.l()[i] * std::log(g.w.ustar[i]);
    // Under Q -> cQ the numerator of Q^{-alpha} picks up c^alpha.
    const double log_c = std::log(opts.q_scale);
    out.zg = LogValue::from_log(
        acsv_log_coefficient(m, log_w, log_P_gibbs(g.rhos) + log_c, 1.0, out.grad_norm, out.r_norm, out.det_h));
    out.zb = LogValue::from_log(acsv_log_coefficient(m, log_w, log_P_bethe(g.rhos) + 0.5 * log_c, 0.5,
                                                     out.grad_norm, out.r_norm, out.det_h));
    out.ratio_b2 = predict_ratio_theorem1(spec.n(), g.rhos).value;
    return out;
}

AsymptoticPrediction predict_Z_sinkhorn_form(const BlockSpec& spec, const PredictOptions& opts) {
    const int m = spec.m(), n = spec.n();
    SinkhornResult s = sinkhorn_scale(expand_block(spec));
    const double log_sc = scaled_sinkhorn_permanent(s).log();

    // ACSV point from the expanded scalers, averaged in logs within each type.
    std::vector<double> t(m), u(m);
    int row = 0;
    for (int i = 0; i < m; ++i) {
        double a = 0;
        for (int r = 0; r < spec.k()[i]; ++r) a += std::log(s.d1[row + r]);
        row += spec.k()[i];
        t[i] = spec.k()[i] * std::exp(2 * a / spec.k()[i]);
    }
    int col = 0;
    for (int j = 0; j < m; ++j) {
        double a = 0;
        for (int c = 0; c < spec.l()[j]; ++c) a += std::log(s.d2[col + c]);
        col += spec.l()[j];
        u[j] = spec.l()[j] * std::exp(2 * a / spec.l()[j]);
    }
    Spectrum sp = spectrum(build_kernels(spec.B(), t, u));

    SaddleGeometry g = saddle_geometry(spec, opts);

    AsymptoticPrediction out;
    out.det_h = g.th.det;
    out.min_hessian_eig = g.th.min_eig;
    out.r_norm = r_norm_of(spec);
    out.grad_norm = out.r_norm / n;
    out.lambda1 = sp.lambdas[0];
    out.rhos = sp.rhos;
    double log_kl = 0;
    for (int i = 0; i < m; ++i)
        log_kl += spec.k()[i] * std::log(double(spec.k()[i])) + spec.l()[i] * std::log(double(spec.l()[i]));
    const double log_prefactor = 0.5 * std::log(2.0 * m) + std::log(double(n)) - log_kl + 2.0 * n + 2 * log_sc -
                                 std::log(out.r_norm) - (m - 1) * std::log(2 * std::numbers::pi * out.r_norm) -
                                 0.5 * std::log(out.det_h);
    out.zg = LogValue::from_log(log_prefactor + log_P_gibbs(sp.rhos));
    out.zb = LogValue::from_log(log_prefactor + log_P_bethe(sp.rhos) - 0.5 * std::log(std::numbers::pi * n));
    out.ratio_b2 = predict_ratio_theorem1(n, sp.rhos).value;
    return out;
}

LogValue allone_zg_closed_form(int m, int nbar) {
    const double n = double(m) * nbar;
    return LogValue::from_log(std::log(double(m)) + 2 * n * std::log(double(m)) -
                              (m - 1) * std::log(2 * std::numbers::pi * nbar));
}

LogValue allone_zg_exact(int m, int nbar) {
    const double n = double(m) * nbar;
    return LogValue::from_log(2 * std::lgamma(n + 1) - 2.0 * m * std::lgamma(nbar + 1.0));
}

}  // namespace bpl
