#pragma once

#include "bpl/matrix.hpp"
#include "bpl/rng.hpp"

#include <cmath>

namespace testing {

// Entries uniform on [lo, lo + 1).
inline bpl::DenseMatrix random_positive(int n, std::uint64_t seed, std::uint64_t which, double lo = 0.1) {
    bpl::KeyedRng rng(seed, which);
    bpl::DenseMatrix A(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = lo + rng.uniform();
    return A;
}

inline double rel_log(double a, double b) { return std::abs(a - b); }

}  // namespace testing
