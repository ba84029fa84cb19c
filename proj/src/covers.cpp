#include "bpl/covers.hpp"

#include "bpl/error.hpp"
#include "bpl/parallel.hpp"
#include "bpl/rng.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace bpl {

void CoverConfig::validate() const {
    if (M < 1 || n < 0) throw Error(ErrorKind::DomainError, "cover degree must be >= 1");
    if (perms.size() != static_cast<std::size_t>(n) * n)
        throw Error(ErrorKind::DimensionMismatch, "cover needs n*n cell permutations");
    for (const auto& p : perms)
        if (p.size() != M) throw Error(ErrorKind::DomainError, "cell permutation has wrong degree");
}

DenseMatrix lift(const DenseMatrix& A, const CoverConfig& cfg) {
    require_square(A, "lift");
    cfg.validate();
    if (static_cast<int>(A.n()) != cfg.n) throw Error(ErrorKind::DimensionMismatch, "cover size differs from matrix");
    const int n = cfg.n, M = cfg.M;
    DenseMatrix L(static_cast<std::size_t>(n) * M);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Permutation& p = cfg.at(i, j);
            for (int r = 0; r < M; ++r) L(i * M + r, j * M + p(r)) = A(i, j);
        }
    return L;
}

namespace {

void check_pair_sum_input(const DenseMatrix& A) {
    require_square(A, "bethe2_pair_sum");
    if (A.n() == 0) throw Error(ErrorKind::DomainError, "empty matrix");
    if (A.n() > 8) throw Error(ErrorKind::TooLarge, "bethe2_pair_sum needs n <= 8");
    for (double x : A.data())
        if (!(x >= 0)) throw Error(ErrorKind::DomainError, "matrix must be nonnegative");
    if (permanent(A).is_zero()) throw Error(ErrorKind::ZeroPermanent, "pair-sum identity needs perm(A) > 0");
}

}  // namespace

LogValue bethe2_pair_sum_double_loop(const DenseMatrix& A) {
    check_pair_sum_input(A);
    const int n = static_cast<int>(A.n());
    const double c = A.max_entry();
    const DenseMatrix N = A.scaled(1.0 / c);
    const auto perms = all_permutations(n);
    std::vector<long double> w(perms.size());
    for (std::size_t s = 0; s < perms.size(); ++s) {
        long double p = 1;
        for (int i = 0; i < n; ++i) p *= N(i, perms[s](i));
        w[s] = p;
    }
    std::vector<Permutation> inv;
    inv.reserve(perms.size());
    for (const auto& p : perms) inv.push_back(p.inverse());

    long double total = 0;
    for (std::size_t a = 0; a < perms.size(); ++a) {
        if (w[a] == 0) continue;
        for (std::size_t b = 0; b < perms.size(); ++b) {
            if (w[b] == 0) continue;
            int cyc = cycle_count(perms[a].compose(inv[b]));
            total += w[a] * w[b] * std::ldexp(1.0L, -cyc);
        }
    }
    return LogValue::from_linear(total).pow(0.5) * LogValue::from_log(n * std::log(c));
}

LogValue bethe2_pair_sum_tau(const DenseMatrix& A, unsigned threads) {
    check_pair_sum_input(A);
    const int n = static_cast<int>(A.n());
    const double c = A.max_entry();
    const DenseMatrix N = A.scaled(1.0 / c);
    const auto taus = all_permutations(n);

    const std::size_t chunks = std::min<std::size_t>(64, taus.size());
    std::vector<long double> partial(chunks, 0.0L);
    for_each_chunk(chunks, threads, [&](std::size_t ch) {
        std::size_t lo = taus.size() * ch / chunks, hi = taus.size() * (ch + 1) / chunks;
        DenseMatrix Mt(n);
        long double acc = 0;
        for (std::size_t t = lo; t < hi; ++t) {
            const Permutation& tau = taus[t];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) Mt(i, j) = N(i, j) * N(i, tau(j));
            LogValue p = permanent_ryser(Mt);
            if (p.is_zero()) continue;
            acc += std::ldexp(std::exp(static_cast<long double>(p.log())), -cycle_count(tau));
        }
        partial[ch] = acc;
    });
    long double total = 0;
    for (long double p : partial) total += p;
    return LogValue::from_linear(total).pow(0.5) * LogValue::from_log(n * std::log(c));
}

LogValue bethe2_pair_sum(const DenseMatrix& A, unsigned threads) {
    require_square(A, "bethe2_pair_sum");
    return A.n() <= 6 ? bethe2_pair_sum_double_loop(A) : bethe2_pair_sum_tau(A, threads);
}

LogValue betheM_exhaustive(const DenseMatrix& A, int M, unsigned threads) {
    require_square(A, "betheM_exhaustive");
    if (M < 1) throw Error(ErrorKind::DomainError, "cover degree must be >= 1");
    const int n = static_cast<int>(A.n());
    if (M == 1) return permanent(A, threads);

    const auto cell_perms = all_permutations(M);
    const double radix = static_cast<double>(cell_perms.size());
    const int cells = n * n;
    if (cells * std::log2(radix) > 20.0 + 1e-12)
        throw Error(ErrorKind::TooLarge, "betheM_exhaustive needs (M!)^(n^2) <= 2^20");
    std::size_t count = 1;
    for (int c = 0; c < cells; ++c) count *= cell_perms.size();

    std::vector<double> logs(count);
    const std::size_t chunks = std::min<std::size_t>(64, count);
    for_each_chunk(chunks, threads, [&](std::size_t ch) {
        std::size_t lo = count * ch / chunks, hi = count * (ch + 1) / chunks;
        CoverConfig cfg{M, n, std::vector<Permutation>(cells, cell_perms[0])};
        for (std::size_t idx = lo; idx < hi; ++idx) {
            std::size_t x = idx;
            for (int c = 0; c < cells; ++c) {
                cfg.perms[c] = cell_perms[x % cell_perms.size()];
                x /= cell_perms.size();
            }
            logs[idx] = permanent_ryser(lift(A, cfg)).log();
        }
    });
    double mean_log = log_sum_exp(logs) - std::log(static_cast<double>(count));
    return LogValue::from_log(mean_log / M);
}

CoverConfig sample_cover(int n, int M, std::uint64_t seed, std::uint64_t sample) {
    CoverConfig cfg{M, n, {}};
    cfg.perms.reserve(static_cast<std::size_t>(n) * n);
    for (int c = 0; c < n * n; ++c) {
        KeyedRng rng(seed, static_cast<std::uint64_t>(c), sample);
        std::vector<int> img(M);
        std::iota(img.begin(), img.end(), 0);
        for (int i = M - 1; i > 0; --i) std::swap(img[i], img[rng.below(i + 1)]);
        cfg.perms.emplace_back(std::move(img));
    }
    return cfg;
}

SampledBethe betheM_sampled(const DenseMatrix& A, int M, int samples, std::uint64_t seed, unsigned threads) {
    require_square(A, "betheM_sampled");
    if (M < 1 || samples < 1) throw Error(ErrorKind::DomainError, "need M >= 1 and samples >= 1");
    const int n = static_cast<int>(A.n());
    if (static_cast<long>(M) * n > 24) throw Error(ErrorKind::TooLarge, "betheM_sampled needs M*n <= 24");
    if (M == 1) return {permanent(A, threads), 0.0};

    std::vector<double> logs(samples);
    const std::size_t chunks = std::min<std::size_t>(64, samples);
    for_each_chunk(chunks, threads, [&](std::size_t ch) {
        std::size_t lo = samples * ch / chunks, hi = samples * (ch + 1) / chunks;
        for (std::size_t s = lo; s < hi; ++s) logs[s] = permanent_ryser(lift(A, sample_cover(n, M, seed, s))).log();
    });
    const double mean_log = log_sum_exp(logs) - std::log(static_cast<double>(samples));
    SampledBethe out{LogValue::from_log(mean_log / M), std::numeric_limits<double>::infinity()};
    if (samples >= 2) {
        // Spread of x_s / mean, which is what the delta method needs.
        double ss = 0;
        for (double l : logs) {
            double r = std::exp(l - mean_log) - 1.0;
            ss += r * r;
        }
        double rel_sd = std::sqrt(ss / (samples - 1));
        out.stderr_log = rel_sd / std::sqrt(static_cast<double>(samples)) / M;
    }
    return out;
}

}  // namespace bpl
