#include "bpl/series.hpp"

#include "bpl/error.hpp"

#include <cmath>

namespace bpl {

MultiPoly::MultiPoly(std::vector<int> bounds) : bounds_(std::move(bounds)) {
    const std::size_t d = bounds_.size();
    for (int b : bounds_)
        if (b < 0) throw Error(ErrorKind::BoundsMismatch, "negative bound");
    strides_.assign(d, 1);
    std::size_t total = 1;
    for (std::size_t i = d; i-- > 0;) {
        strides_[i] = total;
        total *= static_cast<std::size_t>(bounds_[i]) + 1;
    }
    coeffs_.assign(total, 0.0);
}

MultiPoly MultiPoly::constant(const std::vector<int>& bounds, double c) {
    MultiPoly p(bounds);
    p.coeffs_[0] = c;
    return p;
}

MultiPoly MultiPoly::monomial(const std::vector<int>& bounds, const std::vector<int>& exps, double c) {
    MultiPoly p(bounds);
    if (exps.size() != bounds.size()) throw Error(ErrorKind::BoundsMismatch, "exponent length");
    for (std::size_t i = 0; i < exps.size(); ++i)
        if (exps[i] < 0 || exps[i] > bounds[i]) return p;
    p.coeffs_[p.index_of(exps)] = c;
    return p;
}

std::size_t MultiPoly::index_of(const std::vector<int>& exps) const {
    if (exps.size() != bounds_.size()) throw Error(ErrorKind::BoundsMismatch, "exponent length");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] < 0 || exps[i] > bounds_[i]) throw Error(ErrorKind::BoundsMismatch, "exponent outside bounds");
        idx += exps[i] * strides_[i];
    }
    return idx;
}

std::vector<int> MultiPoly::exponents_of(std::size_t index) const {
    std::vector<int> e(bounds_.size());
    for (std::size_t i = 0; i < bounds_.size(); ++i) {
        e[i] = static_cast<int>(index / strides_[i]);
        index %= strides_[i];
    }
    return e;
}

int MultiPoly::total_degree(std::size_t index) const {
    int s = 0;
    for (std::size_t i = 0; i < bounds_.size(); ++i) {
        s += static_cast<int>(index / strides_[i]);
        index %= strides_[i];
    }
    return s;
}

double MultiPoly::coefficient(const std::vector<int>& exps) const {
    for (std::size_t i = 0; i < exps.size() && i < bounds_.size(); ++i)
        if (exps[i] < 0 || exps[i] > bounds_[i]) return 0.0;
    return coeffs_[index_of(exps)];
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    if (o.bounds_ != bounds_) throw Error(ErrorKind::BoundsMismatch, "addition of series with different bounds");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    MultiPoly r = *this;
    r += o;
    return r;
}

MultiPoly MultiPoly::scaled(double c) const {
    MultiPoly r = *this;
    for (double& x : r.coeffs_) x *= c;
    return r;
}

double MultiPoly::evaluate(const std::vector<double>& point) const {
    if (point.size() != bounds_.size()) throw Error(ErrorKind::BoundsMismatch, "evaluation point length");
    double s = 0;
    for (std::size_t idx = 0; idx < coeffs_.size(); ++idx) {
        if (coeffs_[idx] == 0) continue;
        double term = coeffs_[idx];
        auto e = exponents_of(idx);
        for (std::size_t i = 0; i < e.size(); ++i) term *= std::pow(point[i], e[i]);
        s += term;
    }
    return s;
}

double lattice_size(const std::vector<int>& bounds) {
    double s = 1;
    for (int b : bounds) s *= b + 1.0;
    return s;
}

namespace {

// Calls f(index) for every exponent vector e with 0 <= e <= limit, in
// increasing index order of a series with the given strides.
template <class F>
void for_each_in_box(const std::vector<int>& limit, const std::vector<std::size_t>& strides, F&& f) {
    const std::size_t d = limit.size();
    std::vector<int> e(d, 0);
    std::size_t idx = 0;
    while (true) {
        f(idx);
        std::size_t i = d;
        while (i > 0) {
            --i;
            if (e[i] < limit[i]) {
                ++e[i];
                idx += strides[i];
                break;
            }
            idx -= e[i] * strides[i];
            e[i] = 0;
            if (i == 0) return;
        }
        if (d == 0) return;
    }
}

std::vector<std::size_t> strides_for(const std::vector<int>& bounds) {
    std::vector<std::size_t> s(bounds.size(), 1);
    std::size_t total = 1;
    for (std::size_t i = bounds.size(); i-- > 0;) {
        s[i] = total;
        total *= static_cast<std::size_t>(bounds[i]) + 1;
    }
    return s;
}

}  // namespace

MultiPoly poly_mul_trunc(const MultiPoly& a, const MultiPoly& b) {
    if (a.bounds() != b.bounds()) throw Error(ErrorKind::BoundsMismatch, "poly_mul_trunc needs identical bounds");
    const auto& bounds = a.bounds();
    const auto strides = strides_for(bounds);
    MultiPoly out(bounds);
    std::vector<int> room(bounds.size());
    for (std::size_t ia = 0; ia < a.size(); ++ia) {
        const double ca = a[ia];
        if (ca == 0) continue;
        auto ea = a.exponents_of(ia);
        for (std::size_t i = 0; i < bounds.size(); ++i) room[i] = bounds[i] - ea[i];
        for_each_in_box(room, strides, [&](std::size_t ib) {
            const double cb = b[ib];
            if (cb != 0) out[ia + ib] += ca * cb;
        });
    }
    return out;
}

MultiPoly poly_exp_trunc(const MultiPoly& p) {
    if (p.size() == 0) return p;
    if (p[0] != 0) throw Error(ErrorKind::NonzeroConstantTerm, "exp needs a zero constant term");
    const auto& bounds = p.bounds();
    const auto strides = strides_for(bounds);
    MultiPoly E(bounds);
    E[0] = 1.0;
    // Degree-weighted copy of p.
    std::vector<double> dp(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) dp[i] = p.total_degree(i) * p[i];
    for (std::size_t ia = 1; ia < E.size(); ++ia) {
        auto ea = E.exponents_of(ia);
        double acc = 0;
        // b ranges over the box below a; E index is ia - ib.
        for_each_in_box(ea, strides, [&](std::size_t ib) {
            if (ib != 0 && dp[ib] != 0) acc += dp[ib] * E[ia - ib];
        });
        E[ia] = acc / E.total_degree(ia);
    }
    return E;
}

MultiPoly poly_exp_trunc_naive(const MultiPoly& p) {
    if (p.size() == 0) return p;
    if (p[0] != 0) throw Error(ErrorKind::NonzeroConstantTerm, "exp needs a zero constant term");
    MultiPoly E = MultiPoly::constant(p.bounds(), 1.0);
    MultiPoly term = E;
    int max_degree = 0;
    for (int b : p.bounds()) max_degree += b;
    for (int j = 1; j <= max_degree; ++j) {
        term = poly_mul_trunc(term, p).scaled(1.0 / j);
        E += term;
    }
    return E;
}

namespace {

// Entries of W as polynomials, row-major.
std::vector<MultiPoly> walk_matrix(const DenseMatrix& B, const std::vector<int>& bounds) {
    const int m = static_cast<int>(B.n());
    if (static_cast<int>(bounds.size()) != 2 * m) throw Error(ErrorKind::BoundsMismatch, "bounds must have length 2m");
    std::vector<MultiPoly> W;
    W.reserve(static_cast<std::size_t>(m) * m);
    for (int j = 0; j < m; ++j)
        for (int jp = 0; jp < m; ++jp) {
            MultiPoly e(bounds);
            for (int i = 0; i < m; ++i) {
                std::vector<int> exps(2 * m, 0);
                exps[i] = 1;
                exps[m + jp] = 1;
                e += MultiPoly::monomial(bounds, exps, B(i, j) * B(i, jp));
            }
            W.push_back(std::move(e));
        }
    return W;
}

std::vector<MultiPoly> times_walk(const std::vector<MultiPoly>& P, const std::vector<MultiPoly>& W, int m) {
    std::vector<MultiPoly> next;
    next.reserve(P.size());
    for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) {
            MultiPoly s(P[0].bounds());
            for (int b = 0; b < m; ++b) s += poly_mul_trunc(P[a * m + b], W[b * m + c]);
            next.push_back(std::move(s));
        }
    return next;
}

MultiPoly diagonal_sum(const std::vector<MultiPoly>& P, int m) {
    MultiPoly tr(P[0].bounds());
    for (int a = 0; a < m; ++a) tr += P[a * m + a];
    return tr;
}

}  // namespace

MultiPoly trace_power_poly(const DenseMatrix& B, const std::vector<int>& bounds, int h) {
    const int m = static_cast<int>(B.n());
    const auto W = walk_matrix(B, bounds);
    auto P = W;
    for (int step = 2; step <= h; ++step) P = times_walk(P, W, m);
    return diagonal_sum(P, m);
}

namespace {

std::vector<int> spec_bounds(const BlockSpec& spec) {
    std::vector<int> bounds = spec.k();
    bounds.insert(bounds.end(), spec.l().begin(), spec.l().end());
    return bounds;
}

}  // namespace

LogValue walk_coefficient(const BlockSpec& spec, CycleWeights weights, int max_walk_length) {
    const int m = spec.m(), n = spec.n();
    const auto bounds = spec_bounds(spec);
    if (lattice_size(bounds) > kMaxLattice)
        throw Error(ErrorKind::TooLarge, "coefficient lattice exceeds the supported size");
    const int H = max_walk_length > 0 ? max_walk_length : n;
    const double c = spec.B().max_entry();
    const DenseMatrix B = spec.B().scaled(1.0 / c);

    const auto W = walk_matrix(B, bounds);
    MultiPoly L(bounds);
    std::vector<MultiPoly> P = W;
    for (int h = 1; h <= H; ++h) {
        if (h > 1) P = times_walk(P, W, m);
        double w = (weights == CycleWeights::Bethe && h >= 2) ? 1.0 / (2.0 * h) : 1.0 / h;
        L += diagonal_sum(P, m).scaled(w);
    }
    MultiPoly E = poly_exp_trunc(L);
    double coef = E.coefficient(bounds);
    if (!(coef > 0)) return LogValue::zero();
    return LogValue::from_log(std::log(coef) + 2.0 * n * std::log(c));
}

LogValue gibbs_coefficient(const BlockSpec& spec) { return walk_coefficient(spec, CycleWeights::Gibbs); }

LogValue bethe_coefficient(const BlockSpec& spec) { return walk_coefficient(spec, CycleWeights::Bethe); }

double log_multiplicity_factor(const BlockSpec& spec) {
    double s = 0;
    for (int x : spec.k()) s += std::lgamma(x + 1.0);
    for (int x : spec.l()) s += std::lgamma(x + 1.0);
    return s;
}

LogValue permanent_from_series(const BlockSpec& spec) {
    return (gibbs_coefficient(spec) * LogValue::from_log(log_multiplicity_factor(spec))).pow(0.5);
}

LogValue bethe2_from_series(const BlockSpec& spec) {
    return (bethe_coefficient(spec) * LogValue::from_log(log_multiplicity_factor(spec))).pow(0.5);
}

}  // namespace bpl
