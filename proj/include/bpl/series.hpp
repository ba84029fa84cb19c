#pragma once

#include "bpl/blockmat.hpp"
#include "bpl/log_value.hpp"
#include "bpl/matrix.hpp"

#include <cstddef>
#include <vector>

namespace bpl {

// Truncated power series in d variables, dense over the box of exponents
// 0 <= e <= bounds. Exponent vectors are laid out in mixed radix with the
// first variable varying slowest, so every proper divisor of a monomial has a
// smaller index.
class MultiPoly {
public:
    MultiPoly() = default;
    explicit MultiPoly(std::vector<int> bounds);

    static MultiPoly constant(const std::vector<int>& bounds, double c);
    // Zero polynomial if the exponent lies outside the bounds.
    static MultiPoly monomial(const std::vector<int>& bounds, const std::vector<int>& exps, double c = 1.0);

    const std::vector<int>& bounds() const { return bounds_; }
    std::size_t dims() const { return bounds_.size(); }
    std::size_t size() const { return coeffs_.size(); }

    double coefficient(const std::vector<int>& exps) const;
    double& operator[](std::size_t index) { return coeffs_[index]; }
    double operator[](std::size_t index) const { return coeffs_[index]; }
    std::size_t index_of(const std::vector<int>& exps) const;
    std::vector<int> exponents_of(std::size_t index) const;
    int total_degree(std::size_t index) const;

    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly scaled(double c) const;
    double evaluate(const std::vector<double>& point) const;

private:
    std::vector<int> bounds_;
    std::vector<std::size_t> strides_;
    std::vector<double> coeffs_;
};

// Number of monomials in the box prod (b_i + 1).
double lattice_size(const std::vector<int>& bounds);

// Product with out-of-box monomials dropped. Throws BoundsMismatch.
MultiPoly poly_mul_trunc(const MultiPoly& a, const MultiPoly& b);

// exp(p) truncated to the box. Throws NonzeroConstantTerm. Uses the
// degree-operator recurrence |a| E_a = sum_{0 < b <= a} |b| p_b E_{a-b},
// which is exact for truncated series and costs one multiplication.
MultiPoly poly_exp_trunc(const MultiPoly& p);

// Same result by summing p^j / j! until the powers vanish. Kept as the
// reference for the recurrence.
MultiPoly poly_exp_trunc_naive(const MultiPoly& p);

enum class CycleWeights {
    Gibbs,  // 1/h for every h
    Bethe,  // 1 for h = 1, 1/(2h) for h >= 2
};

// Largest lattice the coefficient routines accept.
inline constexpr double kMaxLattice = 20000.0;

// tr(W^h) as a polynomial in (t_1..t_m, u_1..u_m) truncated to (k; l), with
// W_{jj'} = sum_i b_ij b_ij' t_i u_j'.
MultiPoly trace_power_poly(const DenseMatrix& B, const std::vector<int>& bounds, int h);

// [t^k u^l] exp(sum_{h=1}^{H} w_h tr(W^h)). H defaults to n: tr(W^h) has
// t-degree h, so h > n never reaches the target. B is divided by its largest
// entry first and the factor c^{2n} is restored in the log.
LogValue walk_coefficient(const BlockSpec& spec, CycleWeights weights, int max_walk_length = 0);

LogValue gibbs_coefficient(const BlockSpec& spec);
LogValue bethe_coefficient(const BlockSpec& spec);

// log(prod k_i! prod l_j!).
double log_multiplicity_factor(const BlockSpec& spec);

// sqrt(k! l! Z): perm(A) from the Gibbs coefficient and perm_B2(A) from the
// Bethe one.
LogValue permanent_from_series(const BlockSpec& spec);
LogValue bethe2_from_series(const BlockSpec& spec);

}  // namespace bpl
