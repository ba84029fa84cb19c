#pragma once

#include "bpl/log_value.hpp"
#include "bpl/matrix.hpp"

#include <vector>

namespace bpl {

// Bijection on {0..n-1}; image[i] is where i goes.
class Permutation {
public:
    Permutation() = default;
    // Throws DomainError unless image is a bijection on 0..n-1.
    explicit Permutation(std::vector<int> image);
    static Permutation identity(int n);
    // Accepts the 1-based image used in printed examples.
    static Permutation from_one_based(const std::vector<int>& image);

    int size() const { return static_cast<int>(image_.size()); }
    int operator()(int i) const { return image_[i]; }
    const std::vector<int>& image() const { return image_; }

    Permutation inverse() const;
    // (this o other)(i) = this(other(i)).
    Permutation compose(const Permutation& other) const;
    bool operator==(const Permutation& o) const = default;

private:
    std::vector<int> image_;
};

// Number of cycles of length >= 2.
int cycle_count(const Permutation& p);
int fixed_point_count(const Permutation& p);

// Product of a_{i, p(i)}.
LogValue permutation_weight(const DenseMatrix& A, const Permutation& p);

// Direct enumeration in lexicographic order. n <= 10.
LogValue permanent_naive(const DenseMatrix& A);

struct RyserResult {
    LogValue value;
    // Set when cancellation drove the sum to a nonpositive number and it was
    // clamped to zero.
    bool clamped = false;
};

// Inclusion-exclusion over column subsets in Gray-code order with 80-bit
// accumulators. n <= 24. For n >= 14 the subset range is split into 64 fixed
// chunks that may run on `threads` workers (0 = default); the reduction order
// is fixed so the result does not depend on the thread count.
RyserResult permanent_ryser_detailed(const DenseMatrix& A, unsigned threads = 1);
LogValue permanent_ryser(const DenseMatrix& A, unsigned threads = 1);

// Naive for n <= 8, Ryser above.
LogValue permanent(const DenseMatrix& A, unsigned threads = 1);

// All permutations of 0..n-1 in lexicographic order.
std::vector<Permutation> all_permutations(int n);

}  // namespace bpl
