#pragma once

#include "bpl/blockmat.hpp"
#include "bpl/log_value.hpp"
#include "bpl/matrix.hpp"
#include "bpl/sinkhorn.hpp"

#include <vector>

namespace bpl {

// Hessian of Q~(zeta) = 1 - lambda_1(e^zeta) in log coordinates
// zeta = (log t; log u). Central differences of the analytic gradient
// d lambda_1 / d zeta = lambda_1 * perron_log_gradient, at steps h and h/2,
// combined by Richardson extrapolation and symmetrized. step must lie in
// (1e-6, 1e-3). Throws NumericalFailure if the symmetrization defect
// exceeds 1e-6.
DenseMatrix log_hessian_lambda1(const DenseMatrix& B, const std::vector<double>& t, const std::vector<double>& u,
                                double step = 1e-4);
DenseMatrix log_hessian_lambda1(const DenseMatrix& B, const SaddlePoint& w, double step = 1e-4);

struct TangentFrame {
    std::vector<double> c;  // (1_m; -1_m)
    std::vector<double> v;  // log-gradient of Q
    DenseMatrix V;          // 2m x (2m - 2), orthonormal columns orthogonal to c and v
};

// Gram-Schmidt on c, v, then the unit vectors. Throws DegenerateFrame when v
// has no component outside span{c}.
TangentFrame tangent_frame(const std::vector<double>& v);

// det(-|v|^{-1} V^T H V) together with the smallest eigenvalue of that matrix.
struct TangentHessian {
    DenseMatrix H;  // (2m-2) x (2m-2)
    double det = 1.0;
    double min_eig = 0.0;
};
TangentHessian tangent_hessian(const DenseMatrix& hessian, const TangentFrame& frame);

struct AsymptoticPrediction {
    LogValue zg;
    LogValue zb;
    double det_h = 0.0;
    double min_hessian_eig = 0.0;
    double grad_norm = 0.0;  // |grad_log Q(w)|
    double r_norm = 0.0;     // |(k; l)|
    double lambda1 = 0.0;
    std::vector<double> rhos;
    double ratio_b2 = 0.0;   // predicted perm / perm_B2 from the rhos
};

struct PredictOptions {
    double hessian_step = 1e-4;
    // Replaces Q by q_scale * Q. The singular factors are rescaled to match,
    // so the predicted coefficients must not move.
    double q_scale = 1.0;
};

// Coefficient of a pole Q^{-alpha} with numerator value P at the saddle,
// in the d = 2m variable setting:
//   sqrt(2m) w^{-r} P eta^{alpha-1} / (Gamma(alpha) sqrt((2 pi |r|)^{2m-2} det) |grad Q|)
// with eta = |r| / |grad Q|. The gradient norm enters with exponent one.
double acsv_log_coefficient(int m, double log_w_minus_r, double log_P, double alpha, double grad_norm,
                            double r_norm, double det_h);

// Gibbs and Bethe coefficient asymptotics from the m x m saddle point.
AsymptoticPrediction predict_Z(const BlockSpec& spec, const PredictOptions& opts = {});

// The same from the n x n Sinkhorn scalers of the expanded matrix:
//   Z_G ~ sqrt(2m) n k^{-k} l^{-l} e^{2n} scSink^2 / (|r| (2 pi |r|)^{m-1} sqrt(det)) prod (1-rho)^{-1}.
// Only det comes from the block saddle; rhos are recomputed at the point
// built from the expanded scalers.
AsymptoticPrediction predict_Z_sinkhorn_form(const BlockSpec& spec, const PredictOptions& opts = {});

// m m^{2n} / (2 pi nbar)^{m-1} for the all-one base with uniform nbar.
LogValue allone_zg_closed_form(int m, int nbar);

// Exact all-one Gibbs coefficient (n!)^2 / (nbar!)^{2m}.
LogValue allone_zg_exact(int m, int nbar);

}  // namespace bpl
