#include "doctest.h"

#include "bpl/error.hpp"
#include "bpl/exactperm.hpp"
#include "helpers.hpp"

#include <cmath>
#include <numeric>

using namespace bpl;

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

DenseMatrix permuted(const DenseMatrix& A, const Permutation& rows, const Permutation& cols) {
    DenseMatrix out(A.n());
    for (std::size_t i = 0; i < A.n(); ++i)
        for (std::size_t j = 0; j < A.n(); ++j) out(rows(i), cols(j)) = A(i, j);
    return out;
}

}  // namespace

TEST_CASE("small permanents by definition") {
    CHECK(permanent_naive(DenseMatrix(4, 1.0)).value() == doctest::Approx(24.0));
    CHECK(permanent_naive(DenseMatrix{{2, 3}, {5, 7}}).value() == doctest::Approx(2 * 7 + 3 * 5));
    DenseMatrix D{{2, 0, 0}, {0, 3, 0}, {0, 0, 0.5}};
    CHECK(permanent_naive(D).value() == doctest::Approx(3.0));
    CHECK(permanent_ryser(D).value() == doctest::Approx(3.0));
    CHECK(permanent_ryser(DenseMatrix{{4.5}}).value() == doctest::Approx(4.5));
    CHECK(permanent_naive(DenseMatrix{{0, 0}, {1, 1}}).is_zero());
}

TEST_CASE("all-one matrices give n factorial") {
    CHECK(permanent_ryser(DenseMatrix(10, 1.0)).value() == doctest::Approx(3628800.0));
    for (int n = 1; n <= 14; ++n)
        CHECK(permanent_ryser(DenseMatrix(n, 1.0)).log() == doctest::Approx(log_factorial(n)).epsilon(1e-12));
}

TEST_CASE("ryser agrees with enumeration") {
    for (int trial = 0; trial < 20; ++trial) {
        auto A = testing::random_positive(6, 31, trial);
        CHECK(permanent_ryser(A).log() == doctest::Approx(permanent_naive(A).log()).epsilon(1e-12));
    }
}

TEST_CASE("chunked ryser does not depend on the thread count") {
    auto A = testing::random_positive(15, 5, 0);
    auto one = permanent_ryser_detailed(A, 1);
    auto many = permanent_ryser_detailed(A, 4);
    CHECK_FALSE(one.clamped);
    CHECK(one.value.log() == many.value.log());
}

TEST_CASE("permanent invariances") {
    auto A = testing::random_positive(5, 9, 1);
    auto P = Permutation::from_one_based({3, 1, 5, 2, 4});
    auto Q = Permutation::from_one_based({2, 5, 4, 1, 3});
    double base = permanent_naive(A).log();
    CHECK(permanent_naive(permuted(A, P, Q)).log() == doctest::Approx(base).epsilon(1e-13));
    CHECK(permanent_naive(A.transpose()).log() == doctest::Approx(base).epsilon(1e-13));
    CHECK(permanent(A.scaled(2.0)).log() == doctest::Approx(base + 5 * std::log(2.0)));
}

TEST_CASE("sum of permutation weights is the permanent") {
    auto A = testing::random_positive(5, 13, 2);
    long double sum = 0;
    for (const auto& p : all_permutations(5)) sum += permutation_weight(A, p).value();
    CHECK(std::log(static_cast<double>(sum)) == doctest::Approx(permanent_naive(A).log()).epsilon(1e-13));
    CHECK(all_permutations(5).size() == 120);
}

TEST_CASE("permutation weights") {
    DenseMatrix A{{2, 3}, {5, 7}};
    CHECK(permutation_weight(A, Permutation::identity(2)).value() == doctest::Approx(14.0));
    CHECK(permutation_weight(A, Permutation({1, 0})).value() == doctest::Approx(15.0));
    for (const auto& p : all_permutations(4)) CHECK(permutation_weight(DenseMatrix(4, 1.0), p).value() == 1.0);
}

TEST_CASE("cycle counts") {
    CHECK(cycle_count(Permutation::from_one_based({2, 3, 1, 5, 4, 6})) == 2);
    CHECK(cycle_count(Permutation::identity(5)) == 0);
    CHECK(cycle_count(Permutation({1, 0})) == 1);
    for (const auto& p : all_permutations(5)) {
        CHECK(cycle_count(p) + fixed_point_count(p) >= 1);
        // cycle lengths add up to n
        std::vector<bool> seen(5, false);
        int total = 0;
        for (int s = 0; s < 5; ++s) {
            if (seen[s]) continue;
            int x = s;
            do {
                seen[x] = true;
                x = p(x);
                ++total;
            } while (x != s);
        }
        CHECK(total == 5);
    }
}

TEST_CASE("permutation algebra") {
    auto p = Permutation::from_one_based({2, 3, 1});
    CHECK(p.compose(p.inverse()) == Permutation::identity(3));
    CHECK(p.compose(p)(0) == p(p(0)));
    CHECK_THROWS_AS(Permutation({0, 0, 1}), Error);
}

TEST_CASE("size guards") {
    CHECK_THROWS_AS(permanent_naive(DenseMatrix(11, 1.0)), Error);
    CHECK_THROWS_AS(permanent_ryser(DenseMatrix(2, 3, 1.0)), Error);
}
