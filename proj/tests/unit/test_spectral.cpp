#include "doctest.h"

#include "bpl/blockmat.hpp"
#include "bpl/error.hpp"
#include "bpl/sinkhorn.hpp"
#include "bpl/spectral.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace bpl;

namespace {

const double kPi = std::acos(-1.0);

DenseMatrix power(const DenseMatrix& A, int h) {
    auto P = DenseMatrix::identity(A.n());
    for (int i = 0; i < h; ++i) P = P * A;
    return P;
}

std::vector<double> random_vec(int m, std::uint64_t seed, std::uint64_t which) {
    KeyedRng rng(seed, which);
    std::vector<double> v(m);
    for (auto& x : v) x = 0.2 + rng.uniform();
    return v;
}

}  // namespace

TEST_CASE("scalar kernels") {
    auto k = build_kernels(DenseMatrix{{3.0}}, {0.5}, {2.0});
    CHECK(k.W(0, 0) == doctest::Approx(9.0));
    CHECK(k.S(0, 0) == doctest::Approx(9.0));
}

TEST_CASE("unit weights give B^T B") {
    DenseMatrix B{{2, 1}, {1, 2}};
    auto k = build_kernels(B, {1, 1}, {1, 1});
    CHECK(k.S.max_abs_diff(B.transpose() * B) < 1e-15);
    CHECK(k.S(0, 1) == k.S(1, 0));
}

TEST_CASE("cyclic trace identity") {
    for (int m = 1; m <= 4; ++m) {
        auto B = testing::random_positive(m, 3, m);
        auto k = build_kernels(B, random_vec(m, 5, m), random_vec(m, 7, m));
        for (int h = 1; h <= 2 * m; ++h) {
            double tw = power(k.W, h).trace();
            CHECK(power(k.S, h).trace() == doctest::Approx(tw).epsilon(1e-12));
        }
    }
}

TEST_CASE("jacobi matches the 2x2 closed form") {
    // B^T B for B = ((2,1),(1,2)) is ((5,4),(4,5)) with eigenvalues 9 and 1
    auto e = jacobi_eigen(DenseMatrix{{5, 4}, {4, 5}});
    CHECK(e.values[0] == doctest::Approx(9.0));
    CHECK(e.values[1] == doctest::Approx(1.0));
    CHECK(e.vectors(0, 0) > 0);
    CHECK(e.vectors(0, 1) > 0);

    DenseMatrix S{{2.0, 0.7}, {0.7, -1.0}};
    double mid = 0.5, rad = std::sqrt(1.5 * 1.5 + 0.49);
    auto f = jacobi_eigen(S);
    CHECK(f.values[0] == doctest::Approx(mid + rad));
    CHECK(f.values[1] == doctest::Approx(mid - rad));
}

TEST_CASE("jacobi eigenpairs are orthonormal and accurate") {
    auto B = testing::random_positive(5, 11, 0);
    auto S = B.transpose() * B;
    auto e = jacobi_eigen(S);
    auto V = e.vectors;
    CHECK((V.transpose() * V).max_abs_diff(DenseMatrix::identity(5)) < 1e-12);
    for (int c = 0; c < 5; ++c) {
        if (c > 0) CHECK(e.values[c] <= e.values[c - 1]);
        for (int i = 0; i < 5; ++i) {
            double sx = 0;
            for (int j = 0; j < 5; ++j) sx += S(i, j) * V(j, c);
            CHECK(std::abs(sx - e.values[c] * V(i, c)) < 1e-10 * e.values[0]);
        }
    }
}

TEST_CASE("all-one base at the uniform saddle has a single nonzero eigenvalue") {
    for (int m = 2; m <= 4; ++m) {
        std::vector<double> t(m, 1.0 / m);
        auto sp = spectrum(build_kernels(DenseMatrix(m, 1.0), t, t));
        CHECK(sp.lambdas[0] == doctest::Approx(1.0).epsilon(1e-14));
        for (int i = 1; i < m; ++i) CHECK(sp.lambdas[i] == 0.0);
        for (double r : sp.rhos) CHECK(r == 0.0);
    }
}

TEST_CASE("power-law saddle second eigenvalue ratio") {
    for (int n : {4, 8, 12}) {
        BlockSpec spec(pml_block_base({0.6, 0.4}, {2, 1}), {n / 2, n / 2}, {n / 2, n / 2});
        auto w = saddle_point(spec);
        auto sp = spectrum(build_kernels(spec.B(), w.tstar, w.ustar));
        CHECK(sp.lambdas[0] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(sp.rhos[0] - 0.0102) < 5e-4);
    }
}

TEST_CASE("spectrum is invariant under t -> a t, u -> u / a") {
    auto B = testing::random_positive(3, 13, 0);
    auto t = random_vec(3, 17, 0), u = random_vec(3, 19, 0);
    auto base = spectrum(build_kernels(B, t, u));
    for (double a : {0.01, 3.0, 250.0}) {
        std::vector<double> ta = t, ua = u;
        for (auto& x : ta) x *= a;
        for (auto& x : ua) x /= a;
        auto sp = spectrum(build_kernels(B, ta, ua));
        for (int i = 0; i < 3; ++i) CHECK(sp.lambdas[i] == doctest::Approx(base.lambdas[i]).epsilon(1e-11));
    }
}

TEST_CASE("perron gradient sums and finite differences") {
    auto B = testing::random_positive(3, 23, 0);
    auto t = random_vec(3, 29, 0), u = random_vec(3, 31, 0);
    auto g = perron_log_gradient(B, t, u);
    CHECK(g[0] + g[1] + g[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g[3] + g[4] + g[5] == doctest::Approx(1.0).epsilon(1e-12));

    const double h = 1e-5;
    for (int c = 0; c < 6; ++c) {
        auto tp = t, tm = t, up = u, um = u;
        if (c < 3) {
            tp[c] *= std::exp(h);
            tm[c] *= std::exp(-h);
        } else {
            up[c - 3] *= std::exp(h);
            um[c - 3] *= std::exp(-h);
        }
        double fd = (std::log(lambda1(B, tp, up)) - std::log(lambda1(B, tm, um))) / (2 * h);
        CHECK(std::abs(fd - g[c]) < 1e-6);
    }
}

TEST_CASE("perron gradient at the saddle is the normalized multiplicities") {
    BlockSpec spec(DenseMatrix{{0.9, 0.3}, {0.2, 0.6}}, {3, 5}, {6, 2});
    auto w = saddle_point(spec);
    auto g = perron_log_gradient(spec.B(), w.tstar, w.ustar);
    CHECK(g[0] == doctest::Approx(3.0 / 8).epsilon(1e-9));
    CHECK(g[1] == doctest::Approx(5.0 / 8).epsilon(1e-9));
    CHECK(g[2] == doctest::Approx(6.0 / 8).epsilon(1e-9));
    CHECK(g[3] == doctest::Approx(2.0 / 8).epsilon(1e-9));
    CHECK(lambda1(spec.B(), w.tstar, w.ustar) == doctest::Approx(1.0).epsilon(1e-10));

    auto s = perron_log_gradient(DenseMatrix{{1.7}}, {0.3}, {2.0});
    CHECK(s[0] == doctest::Approx(1.0));
    CHECK(s[1] == doctest::Approx(1.0));
}

TEST_CASE("nonpositive inputs are rejected") {
    std::vector<double> t{0.5, 0.5};
    CHECK_THROWS_AS(perron_log_gradient(DenseMatrix::identity(2), t, t), Error);
    CHECK_THROWS_AS(build_kernels(DenseMatrix(2, 1.0), {0.5, 0.0}, t), Error);
}

TEST_CASE("ratio predictions") {
    CHECK(predict_ratio_theorem1(5, {0.0}).value == doctest::Approx(std::pow(5 * kPi / std::exp(1.0), 0.25)));
    CHECK(predict_ratio_theorem1(5, {0.0}).value == doctest::Approx(1.5502).epsilon(1e-4));
    double corr = predict_ratio_theorem1(12, {0.0102}).value / predict_ratio_theorem1(12, {}).value;
    CHECK(std::abs(corr - 1.0) < 1e-4);

    auto near = predict_ratio_theorem1(5, {1.0 - 1e-14});
    CHECK(near.flagged);
    CHECK(std::isfinite(near.value));
    CHECK_THROWS_AS(predict_ratio_theorem1(5, {1.0}), Error);
    CHECK_THROWS_AS(predict_ratio_theorem1(5, {-0.1}), Error);

    CHECK(predict_ratio_smallrho(7, {0.0}).value == predict_ratio_theorem1(7, {0.0}).value);
    CHECK(std::abs(predict_ratio_smallrho(5, {0.1}).value - predict_ratio_theorem1(5, {0.1}).value) < 1e-3 * 1.6);
    CHECK(std::abs(predict_ratio_smallrho(5, {0.0102}).value - predict_ratio_theorem1(5, {0.0102}).value) < 1e-6);
    CHECK(predict_ratio_smallrho(5, {0.6}).flagged);

    CHECK(allone_ratio_bethe2(5) == doctest::Approx(predict_ratio_theorem1(5, {}).value));
    CHECK(allone_ratio_bethe(5) == doctest::Approx(std::sqrt(10 * kPi / std::exp(1.0))));
}
