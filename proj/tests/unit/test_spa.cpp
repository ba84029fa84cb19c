#include "doctest.h"

#include "bpl/blockmat.hpp"
#include "bpl/error.hpp"
#include "bpl/exactperm.hpp"
#include "bpl/spa.hpp"
#include "helpers.hpp"

#include <algorithm>
#include <cmath>

using namespace bpl;

namespace {

// n^n (1 - 1/n)^{n(n-1)}, the functional at the uniform point of the all-one matrix.
double log_allone_bethe(int n) {
    return n * std::log(static_cast<double>(n)) + n * (n - 1.0) * std::log1p(-1.0 / n);
}

}  // namespace

TEST_CASE("free energy closed forms") {
    CHECK(bethe_free_energy(DenseMatrix{{2.0}}, DenseMatrix{{1.0}}) == doctest::Approx(-std::log(2.0)));
    for (int n = 2; n <= 6; ++n) {
        double F = bethe_free_energy(DenseMatrix(n, 1.0), DenseMatrix(n, 1.0 / n));
        CHECK(-F == doctest::Approx(log_allone_bethe(n)).epsilon(1e-13));
    }
    auto A = testing::random_positive(4, 3, 0);
    auto p = Permutation::from_one_based({2, 4, 1, 3});
    DenseMatrix P(4);
    for (int i = 0; i < 4; ++i) P(i, p(i)) = 1.0;
    CHECK(bethe_free_energy(A, P) == doctest::Approx(-permutation_weight(A, p).log()).epsilon(1e-14));
}

TEST_CASE("free energy rejects points off the polytope") {
    CHECK_THROWS_AS(bethe_free_energy(DenseMatrix(2, 1.0), DenseMatrix{{0.7, 0.7}, {0.3, 0.3}}), Error);
    CHECK_THROWS_AS(bethe_free_energy(DenseMatrix{{1, 0}, {0, 1}}, DenseMatrix(2, 0.5)), Error);
}

TEST_CASE("bethe permanent small cases") {
    auto two = bethe_permanent(DenseMatrix(2, 1.0));
    CHECK(two.converged);
    CHECK(two.value.value() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(bethe_permanent(DenseMatrix{{3.5}}).value.value() == doctest::Approx(3.5));
    for (int n = 3; n <= 6; ++n)
        CHECK(bethe_permanent(DenseMatrix(n, 1.0)).value.log() == doctest::Approx(log_allone_bethe(n)).epsilon(1e-10));
}

TEST_CASE("power-law block matrix sits inside the sandwich") {
    auto A = expand_block(BlockSpec(pml_block_base({0.6, 0.4}, {2, 1}), {2, 2}, {2, 2}));
    auto s = bethe_permanent(A);
    REQUIRE(s.converged);
    double r = permanent(A).log() - s.value.log();
    CHECK(r >= -1e-12);
    CHECK(r <= 2 * std::log(2.0) + 1e-12);
}

TEST_CASE("sandwich and doubly stochastic solution on random matrices") {
    for (int n = 2; n <= 7; ++n) {
        auto A = testing::random_positive(n, 11, n, 0.05);
        auto s = bethe_permanent(A);
        REQUIRE(s.converged);
        double r = permanent(A).log() - s.value.log();
        CHECK(r >= -1e-9);
        CHECK(r <= 0.5 * n * std::log(2.0) + 1e-9);
        for (int i = 0; i < n; ++i) {
            double row = 0, col = 0;
            for (int j = 0; j < n; ++j) {
                row += s.gamma(i, j);
                col += s.gamma(j, i);
                CHECK(s.gamma(i, j) >= 0.0);
                CHECK(s.gamma(i, j) <= 1.0);
            }
            CHECK(row == doctest::Approx(1.0).epsilon(1e-11));
            CHECK(col == doctest::Approx(1.0).epsilon(1e-11));
        }
        // n = 2 has its minimum on a vertex, where the interior condition does not apply
        if (n >= 3) CHECK(s.stationarity < 1e-8);
    }
}

TEST_CASE("two by two reduces to the larger diagonal product") {
    // the entropy terms cancel, leaving F linear in the one free parameter
    for (int trial = 0; trial < 5; ++trial) {
        auto A = testing::random_positive(2, 13, trial);
        double best = std::max(A(0, 0) * A(1, 1), A(0, 1) * A(1, 0));
        CHECK(bethe_permanent(A).value.log() == doctest::Approx(std::log(best)).epsilon(1e-8));
    }
}

TEST_CASE("scale equivariance") {
    auto A = testing::random_positive(5, 17, 0);
    double base = bethe_permanent(A).value.log();
    CHECK(bethe_permanent(A.scaled(3.0)).value.log() == doctest::Approx(base + 5 * std::log(3.0)).epsilon(1e-10));
}

TEST_CASE("block-constant input gives a block-constant minimizer") {
    BlockSpec spec(DenseMatrix{{0.9, 0.2}, {0.4, 0.7}}, {2, 3}, {3, 2});
    auto s = bethe_permanent(expand_block(spec));
    REQUIRE(s.converged);
    std::vector<int> row_type{0, 0, 1, 1, 1}, col_type{0, 0, 0, 1, 1};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int i2 = 0; i2 < 5; ++i2)
                for (int j2 = 0; j2 < 5; ++j2)
                    if (row_type[i] == row_type[i2] && col_type[j] == col_type[j2])
                        CHECK(std::abs(s.gamma(i, j) - s.gamma(i2, j2)) < 1e-10);
}

TEST_CASE("restart from another doubly stochastic point reaches the same value") {
    auto A = testing::random_positive(5, 19, 0);
    auto a = bethe_permanent(A);
    auto b = bethe_permanent_from(A, DenseMatrix(5, 0.2));
    CHECK(b.converged);
    CHECK(a.value.log() == doctest::Approx(b.value.log()).epsilon(1e-10));
}

TEST_CASE("iteration cap") {
    auto A = testing::random_positive(5, 23, 0);
    SpaOptions o;
    o.max_iterations = 1;
    auto s = bethe_permanent(A, o);
    CHECK_FALSE(s.converged);
    o.require_convergence = true;
    CHECK_THROWS_AS(bethe_permanent(A, o), NotConverged<BetheSolution>);
}

TEST_CASE("damping reaches the same fixed point") {
    auto A = testing::random_positive(4, 29, 0);
    SpaOptions o;
    o.damping = 0.5;
    auto s = bethe_permanent(A, o);
    CHECK(s.converged);
    CHECK(s.value.log() == doctest::Approx(bethe_permanent(A).value.log()).epsilon(1e-10));
}
