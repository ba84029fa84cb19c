#include "doctest.h"

#include "bpl/covers.hpp"
#include "bpl/error.hpp"
#include "bpl/exactperm.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace bpl;

namespace {

CoverConfig uniform_cover(int n, int M, const Permutation& p) {
    CoverConfig cfg;
    cfg.M = M;
    cfg.n = n;
    cfg.perms.assign(static_cast<std::size_t>(n) * n, p);
    return cfg;
}

}  // namespace

TEST_CASE("lift of degree one is the matrix") {
    auto A = testing::random_positive(3, 1, 0);
    CHECK(lift(A, uniform_cover(3, 1, Permutation::identity(1))) == A);
}

TEST_CASE("lift of a scalar with the identity cell") {
    auto L = lift(DenseMatrix{{2.5}}, uniform_cover(1, 2, Permutation::identity(2)));
    CHECK(L == DenseMatrix{{2.5, 0}, {0, 2.5}});
}

TEST_CASE("swap covers square the permanent") {
    auto A = testing::random_positive(2, 2, 0);
    auto L = lift(A, uniform_cover(2, 2, Permutation({1, 0})));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(L(2 * i, 2 * j + 1) == A(i, j));
            CHECK(L(2 * i + 1, 2 * j) == A(i, j));
            CHECK(L(2 * i, 2 * j) == 0.0);
        }
    CHECK(permanent_naive(L).log() == doctest::Approx(2 * permanent_naive(A).log()));
}

TEST_CASE("pair sum small cases") {
    CHECK(bethe2_pair_sum(DenseMatrix{{3.0}}).value() == doctest::Approx(3.0));
    CHECK(bethe2_pair_sum(DenseMatrix(2, 1.0)).value() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("pair sum equals the exhaustive degree-two cover average") {
    CHECK(bethe2_pair_sum(DenseMatrix(3, 1.0)).log() ==
          doctest::Approx(betheM_exhaustive(DenseMatrix(3, 1.0), 2).log()).epsilon(1e-12));
    for (int trial = 0; trial < 5; ++trial) {
        auto A = testing::random_positive(3, 41, trial);
        CHECK(bethe2_pair_sum(A).log() == doctest::Approx(betheM_exhaustive(A, 2).log()).epsilon(1e-10));
    }
    auto A4 = testing::random_positive(4, 43, 0);
    CHECK(bethe2_pair_sum(A4).log() == doctest::Approx(betheM_exhaustive(A4, 2).log()).epsilon(1e-10));
}

TEST_CASE("regrouped pair sum agrees with the double loop") {
    for (int n = 1; n <= 6; ++n) {
        auto A = testing::random_positive(n, 47, n);
        CHECK(bethe2_pair_sum_tau(A).log() == doctest::Approx(bethe2_pair_sum_double_loop(A).log()).epsilon(1e-12));
    }
}

TEST_CASE("pair weights depend only on the relative permutation") {
    // For each tau, sum_s w(tau o s) w(s) computed directly equals the
    // permanent of a_ij a_{i,tau(j)}.
    auto A = testing::random_positive(4, 53, 0);
    for (const auto& tau : all_permutations(4)) {
        long double direct = 0;
        for (const auto& s : all_permutations(4))
            direct += permutation_weight(A, tau.compose(s)).value() * permutation_weight(A, s).value();
        DenseMatrix Mt(4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) Mt(i, j) = A(i, j) * A(i, tau(j));
        CHECK(std::log(static_cast<double>(direct)) == doctest::Approx(permanent_naive(Mt).log()).epsilon(1e-13));
    }
}

TEST_CASE("degree-two value never exceeds the permanent") {
    for (int n = 2; n <= 7; ++n) {
        auto A = testing::random_positive(n, 59, n, 0.01);
        CHECK(bethe2_pair_sum(A).log() <= permanent(A).log() + 1e-12);
    }
}

TEST_CASE("degree-one covers reproduce the permanent") {
    auto A = testing::random_positive(4, 61, 0);
    CHECK(betheM_exhaustive(A, 1).log() == permanent(A).log());
    auto s = betheM_sampled(A, 1, 5, 3);
    CHECK(s.estimate.log() == permanent(A).log());
    CHECK(s.stderr_log == 0.0);
    CHECK(betheM_exhaustive(DenseMatrix{{1.7}}, 2).value() == doctest::Approx(1.7));
}

TEST_CASE("sampled covers estimate the exhaustive average") {
    auto A = testing::random_positive(3, 67, 0);
    double exact = betheM_exhaustive(A, 2).log();
    auto s = betheM_sampled(A, 2, 512 * 8, 99);
    CHECK(std::isfinite(s.stderr_log));
    CHECK(std::abs(s.estimate.log() - exact) <= 3 * s.stderr_log);
}

TEST_CASE("sampling is reproducible") {
    auto A = testing::random_positive(3, 71, 0);
    auto a = betheM_sampled(A, 2, 1, 5);
    auto b = betheM_sampled(A, 2, 1, 5);
    CHECK(a.estimate.log() == b.estimate.log());
    CHECK(std::isinf(a.stderr_log));
    auto c1 = betheM_sampled(A, 3, 64, 5, 1);
    auto c4 = betheM_sampled(A, 3, 64, 5, 4);
    CHECK(c1.estimate.log() == c4.estimate.log());
    auto x = sample_cover(3, 3, 8, 2);
    auto y = sample_cover(3, 3, 8, 2);
    CHECK(x.perms == y.perms);
    x.validate();
}

TEST_CASE("guards") {
    CHECK_THROWS_AS(betheM_exhaustive(DenseMatrix(5, 1.0), 2), Error);
    CHECK_THROWS_AS(bethe2_pair_sum(DenseMatrix(9, 1.0)), Error);
    CHECK_THROWS_AS(bethe2_pair_sum(DenseMatrix(2, 0.0)), Error);
    CHECK_THROWS_AS(betheM_sampled(DenseMatrix(5, 1.0), 5, 2, 1), Error);
}
