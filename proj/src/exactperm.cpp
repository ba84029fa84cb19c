#include "bpl/exactperm.hpp"

#include "bpl/error.hpp"
#include "bpl/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace bpl {

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
    const int n = size();
    std::vector<char> seen(n, 0);
    for (int x : image_) {
        if (x < 0 || x >= n || seen[x]) throw Error(ErrorKind::DomainError, "not a permutation");
        seen[x] = 1;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> img(n);
    std::iota(img.begin(), img.end(), 0);
    return Permutation(std::move(img));
}

Permutation Permutation::from_one_based(const std::vector<int>& image) {
    std::vector<int> img(image);
    for (int& x : img) --x;
    return Permutation(std::move(img));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(image_.size());
    for (int i = 0; i < size(); ++i) inv[image_[i]] = i;
    return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
    if (other.size() != size()) throw Error(ErrorKind::DimensionMismatch, "compose");
    std::vector<int> img(image_.size());
    for (int i = 0; i < size(); ++i) img[i] = image_[other(i)];
    return Permutation(std::move(img));
}

int cycle_count(const Permutation& p) {
    const int n = p.size();
    std::vector<char> seen(n, 0);
    int cycles = 0;
    for (int i = 0; i < n; ++i) {
        if (seen[i]) continue;
        int len = 0;
        for (int j = i; !seen[j]; j = p(j)) {
            seen[j] = 1;
            ++len;
        }
        if (len >= 2) ++cycles;
    }
    return cycles;
}

int fixed_point_count(const Permutation& p) {
    int f = 0;
    for (int i = 0; i < p.size(); ++i) f += p(i) == i;
    return f;
}

LogValue permutation_weight(const DenseMatrix& A, const Permutation& p) {
    require_square(A, "permutation_weight");
    if (static_cast<int>(A.n()) != p.size()) throw Error(ErrorKind::DimensionMismatch, "permutation_weight");
    double s = 0;
    for (int i = 0; i < p.size(); ++i) {
        double a = A(i, p(i));
        if (a == 0) return LogValue::zero();
        s += std::log(a);
    }
    return LogValue::from_log(s);
}

namespace {

// Divides by the largest entry so the products neither overflow nor
// underflow; returns log of the factor to add back times n.
double normalize(const DenseMatrix& A, DenseMatrix& out) {
    double c = A.max_entry();
    if (c <= 0) {
        out = A;
        return 0.0;
    }
    out = A.scaled(1.0 / c);
    return std::log(c);
}

}  // namespace

LogValue permanent_naive(const DenseMatrix& A) {
    require_square(A, "permanent_naive");
    const int n = static_cast<int>(A.n());
    if (n > 10) throw Error(ErrorKind::TooLarge, "permanent_naive needs n <= 10");
    if (n == 0) return LogValue::one();
    DenseMatrix N;
    double log_c = normalize(A, N);
    std::vector<int> s(n);
    std::iota(s.begin(), s.end(), 0);
    long double total = 0;
    do {
        long double p = 1;
        for (int i = 0; i < n; ++i) p *= N(i, s[i]);
        total += p;
    } while (std::next_permutation(s.begin(), s.end()));
    LogValue v = LogValue::from_linear(total);
    return v * LogValue::from_log(n * log_c);
}

RyserResult permanent_ryser_detailed(const DenseMatrix& A, unsigned threads) {
    require_square(A, "permanent_ryser");
    const int n = static_cast<int>(A.n());
    if (n > 24) throw Error(ErrorKind::TooLarge, "permanent_ryser needs n <= 24");
    if (n == 0) return {LogValue::one(), false};
    DenseMatrix N;
    double log_c = normalize(A, N);

    const std::uint64_t total = std::uint64_t{1} << n;
    const std::size_t chunks = n >= 14 ? 64 : 1;
    const std::uint64_t per = total / chunks;
    std::vector<long double> partial(chunks, 0.0L);

    for_each_chunk(chunks, threads, [&](std::size_t c) {
        const std::uint64_t begin = c * per;
        const std::uint64_t end = begin + per;
        std::vector<long double> rowsum(n, 0.0L);
        std::uint64_t gray = begin ^ (begin >> 1);
        for (int j = 0; j < n; ++j)
            if (gray >> j & 1)
                for (int i = 0; i < n; ++i) rowsum[i] += N(i, j);
        long double acc = 0;
        for (std::uint64_t g = begin; g < end; ++g) {
            if (g != begin) {
                int j = std::countr_zero(g);
                gray ^= std::uint64_t{1} << j;
                if (gray >> j & 1)
                    for (int i = 0; i < n; ++i) rowsum[i] += N(i, j);
                else
                    for (int i = 0; i < n; ++i) rowsum[i] -= N(i, j);
            }
            if (gray == 0) continue;
            long double p = 1;
            for (int i = 0; i < n; ++i) p *= rowsum[i];
            if (std::popcount(gray) & 1)
                acc -= p;
            else
                acc += p;
        }
        partial[c] = acc;
    });

    long double sum = 0;
    for (long double p : partial) sum += p;
    if (n & 1) sum = -sum;
    if (sum <= 0) return {LogValue::zero(), true};
    return {LogValue::from_linear(sum) * LogValue::from_log(n * log_c), false};
}

LogValue permanent_ryser(const DenseMatrix& A, unsigned threads) { return permanent_ryser_detailed(A, threads).value; }

LogValue permanent(const DenseMatrix& A, unsigned threads) {
    require_square(A, "permanent");
    return A.n() <= 8 ? permanent_naive(A) : permanent_ryser(A, threads);
}

std::vector<Permutation> all_permutations(int n) {
    std::vector<Permutation> out;
    std::vector<int> s(n);
    std::iota(s.begin(), s.end(), 0);
    do out.emplace_back(s);
    while (std::next_permutation(s.begin(), s.end()));
    return out;
}

}  // namespace bpl
