#include "doctest.h"

#include "bpl/blockmat.hpp"
#include "bpl/error.hpp"
#include "bpl/exactperm.hpp"
#include "bpl/sinkhorn.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace bpl;

TEST_CASE("all-one matrix scales to the uniform matrix") {
    auto s = sinkhorn_scale(DenseMatrix(5, 1.0));
    for (double x : s.U.data()) CHECK(x == doctest::Approx(0.2).epsilon(1e-14));
    for (double d : s.d1) CHECK(d == doctest::Approx(1.0 / std::sqrt(5.0)));
    CHECK(scaled_sinkhorn_permanent(DenseMatrix(5, 1.0)).log() == doctest::Approx(-5.0 + 5 * std::log(5.0)));
}

TEST_CASE("doubly stochastic input is a fixed point") {
    DenseMatrix A{{0.2, 0.5, 0.3}, {0.5, 0.1, 0.4}, {0.3, 0.4, 0.3}};
    auto s = sinkhorn_scale(A);
    CHECK(s.U.max_abs_diff(A) < 1e-13);
    for (int i = 0; i < 3; ++i) {
        CHECK(s.d1[i] == doctest::Approx(1.0));
        CHECK(s.d2[i] == doctest::Approx(1.0));
    }
}

TEST_CASE("scaled matrix is doubly stochastic and gauge-fixed") {
    auto A = testing::random_positive(6, 3, 0);
    auto s = sinkhorn_scale(A);
    CHECK(s.residual <= kSinkhornTol);
    double log_prod1 = 0, log_prod2 = 0;
    for (int i = 0; i < 6; ++i) {
        log_prod1 += std::log(s.d1[i]);
        log_prod2 += std::log(s.d2[i]);
        for (int j = 0; j < 6; ++j) CHECK(s.U(i, j) == doctest::Approx(s.d1[i] * A(i, j) * s.d2[j]).epsilon(1e-14));
    }
    CHECK(log_prod1 == doctest::Approx(log_prod2));
}

TEST_CASE("scaled permanent is gauge invariant") {
    auto A = testing::random_positive(5, 5, 0);
    auto s = sinkhorn_scale(A);
    double base = scaled_sinkhorn_permanent(s).log();
    for (double c : {0.1, 2.0, 37.0}) {
        auto g = s;
        for (auto& d : g.d1) d *= c;
        for (auto& d : g.d2) d /= c;
        CHECK(scaled_sinkhorn_permanent(g).log() == doctest::Approx(base).epsilon(1e-13));
    }
}

TEST_CASE("scaled permanent of a scalar") {
    CHECK(scaled_sinkhorn_permanent(DenseMatrix{{4.0}}).value() == doctest::Approx(4.0 / std::exp(1.0)));
}

TEST_CASE("scaled permanent bounds") {
    for (int n = 1; n <= 8; ++n) {
        auto A = testing::random_positive(n, 7, n, 0.01);
        double r = permanent(A).log() - scaled_sinkhorn_permanent(A).log();
        CHECK(r >= n + std::lgamma(n + 1.0) - n * std::log(n) - 1e-9);
        CHECK(r <= n + 1e-9);
    }
}

TEST_CASE("scalers are uniform within types") {
    BlockSpec spec(DenseMatrix{{0.9, 0.2}, {0.4, 0.7}}, {2, 3}, {4, 1});
    auto s = sinkhorn_scale(expand_block(spec));
    CHECK(s.d1[0] == doctest::Approx(s.d1[1]).epsilon(1e-12));
    CHECK(s.d1[2] == doctest::Approx(s.d1[4]).epsilon(1e-12));
    CHECK(s.d2[0] == doctest::Approx(s.d2[3]).epsilon(1e-12));

    // the block system reproduces the same products d1_i d2_j
    auto w = block_fixed_point(spec);
    CHECK(w.residual < 1e-12);
    CHECK(s.d1[0] * s.d2[0] == doctest::Approx(w.vright[0] * w.vleft[0]).epsilon(1e-11));
    CHECK(s.d1[4] * s.d2[4] == doctest::Approx(w.vright[1] * w.vleft[1]).epsilon(1e-11));
    CHECK(scaled_sinkhorn_permanent_block(spec, w).log() ==
          doctest::Approx(scaled_sinkhorn_permanent(s).log()).epsilon(1e-11));
}

TEST_CASE("block scalers closed forms") {
    auto one = block_fixed_point(BlockSpec(DenseMatrix{{2.0}}, {5}, {5}));
    CHECK(one.vright[0] == doctest::Approx(1.0 / std::sqrt(10.0)));
    CHECK(one.vleft[0] == doctest::Approx(1.0 / std::sqrt(10.0)));

    auto w = saddle_point(all_one_spec(3, 4));
    for (int i = 0; i < 3; ++i) {
        CHECK(w.vright[i] == doctest::Approx(1.0 / std::sqrt(12.0)));
        CHECK(w.tstar[i] == doctest::Approx(1.0 / 3));
        CHECK(w.ustar[i] == doctest::Approx(1.0 / 3));
    }
}

TEST_CASE("power-law saddle equations hold") {
    BlockSpec spec(pml_block_base({0.6, 0.4}, {2, 1}), {6, 6}, {6, 6});
    auto w = saddle_point(spec);
    CHECK(w.residual < 1e-12);
    CHECK(block_equation_residual(spec, w.vright, w.vleft) < 1e-12);
    for (int i = 0; i < 2; ++i) {
        CHECK(w.tstar[i] == doctest::Approx(6 * w.vright[i] * w.vright[i]));
        CHECK(w.ustar[i] == doctest::Approx(6 * w.vleft[i] * w.vleft[i]));
    }
}

TEST_CASE("different starting points give the same block solution") {
    BlockSpec spec(DenseMatrix{{0.3, 0.8, 0.5}, {0.9, 0.1, 0.6}, {0.2, 0.7, 0.4}}, {2, 3, 1}, {1, 1, 4});
    auto a = block_fixed_point(spec);
    auto b = block_fixed_point_from(spec, {3.0, 0.1, 1.0}, {0.5, 2.0, 0.01});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(a.vright[i] * a.vleft[j] == doctest::Approx(b.vright[i] * b.vleft[j]).epsilon(1e-10));
}

TEST_CASE("iteration cap and invalid input") {
    auto A = testing::random_positive(6, 9, 0, 0.001);
    CHECK_THROWS_AS(sinkhorn_scale(A, 1e-15, 1), NotConverged<SinkhornResult>);
    CHECK_THROWS_AS(sinkhorn_scale(DenseMatrix{{1, 0}, {1, 1}}), Error);
}
