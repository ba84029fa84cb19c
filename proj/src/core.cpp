#include "bpl/error.hpp"
#include "bpl/log_value.hpp"
#include "bpl/matrix.hpp"
#include "bpl/parallel.hpp"
#include "bpl/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

namespace bpl {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::ZeroPermanent: return "ZeroPermanent";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NotConverged: return "NotConverged";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
        case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
        case ErrorKind::BoundsMismatch: return "BoundsMismatch";
        case ErrorKind::NonzeroConstantTerm: return "NonzeroConstantTerm";
        case ErrorKind::DegenerateFrame: return "DegenerateFrame";
        case ErrorKind::NonPositiveHessian: return "NonPositiveHessian";
        case ErrorKind::InsufficientData: return "InsufficientData";
    }
    return "Error";
}

// LogValue

LogValue LogValue::from_log(double log_value) {
    LogValue v;
    if (std::isinf(log_value) && log_value < 0) return v;
    v.log_ = log_value;
    v.zero_ = false;
    return v;
}

LogValue LogValue::from_linear(double value) {
    if (value < 0 || std::isnan(value)) throw Error(ErrorKind::DomainError, "LogValue of a negative number");
    if (value == 0) return zero();
    return from_log(std::log(value));
}

LogValue LogValue::from_linear(long double value) {
    if (value < 0 || std::isnan(value)) throw Error(ErrorKind::DomainError, "LogValue of a negative number");
    if (value == 0) return zero();
    return from_log(static_cast<double>(std::log(value)));
}

LogValue LogValue::operator*(const LogValue& o) const {
    if (zero_ || o.zero_) return zero();
    return from_log(log_ + o.log_);
}

LogValue LogValue::operator/(const LogValue& o) const {
    if (o.zero_) throw Error(ErrorKind::DomainError, "LogValue division by zero");
    if (zero_) return zero();
    return from_log(log_ - o.log_);
}

LogValue LogValue::operator+(const LogValue& o) const {
    if (zero_) return o;
    if (o.zero_) return *this;
    double hi = std::max(log_, o.log_);
    double lo = std::min(log_, o.log_);
    return from_log(hi + std::log1p(std::exp(lo - hi)));
}

LogValue LogValue::pow(double exponent) const {
    if (zero_) return exponent == 0 ? one() : zero();
    return from_log(log_ * exponent);
}

double log_sum_exp(std::span<const double> logs) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : logs) hi = std::max(hi, x);
    if (std::isinf(hi)) return hi;
    double s = 0;
    for (double x : logs) s += std::exp(x - hi);
    return hi + std::log(s);
}

double log_distance(const LogValue& a, const LogValue& b) {
    if (a.is_zero() && b.is_zero()) return 0.0;
    if (a.is_zero() || b.is_zero()) return std::numeric_limits<double>::infinity();
    return std::abs(a.log() - b.log());
}

// DenseMatrix

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix I(n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    DenseMatrix A;
    A.rows_ = rows.size();
    A.cols_ = A.rows_ ? rows[0].size() : 0;
    for (const auto& r : rows) {
        if (r.size() != A.cols_) throw Error(ErrorKind::DimensionMismatch, "ragged matrix rows");
        A.data_.insert(A.data_.end(), r.begin(), r.end());
    }
    return A;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix T(cols_, rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
    return T;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& o) const {
    if (cols_ != o.rows_) throw Error(ErrorKind::DimensionMismatch, "matrix product");
    DenseMatrix P(rows_, o.cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            double a = (*this)(i, k);
            for (std::size_t j = 0; j < o.cols_; ++j) P(i, j) += a * o(k, j);
        }
    return P;
}

DenseMatrix DenseMatrix::scaled(double c) const {
    DenseMatrix S = *this;
    for (double& x : S.data_) x *= c;
    return S;
}

double DenseMatrix::max_entry() const { return *std::max_element(data_.begin(), data_.end()); }
double DenseMatrix::min_entry() const { return *std::min_element(data_.begin(), data_.end()); }

double DenseMatrix::max_abs_diff(const DenseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorKind::DimensionMismatch, "max_abs_diff");
    double d = 0;
    for (std::size_t i = 0; i < data_.size(); ++i) d = std::max(d, std::abs(data_[i] - o.data_[i]));
    return d;
}

double DenseMatrix::trace() const {
    double s = 0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
}

std::vector<std::vector<double>> DenseMatrix::to_rows() const {
    std::vector<std::vector<double>> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i), row(i) + cols_);
    return out;
}

void require_square(const DenseMatrix& A, const char* where) {
    if (!A.square()) throw Error(ErrorKind::DimensionMismatch, std::string(where) + ": matrix is not square");
}

void require_positive(const DenseMatrix& A, const char* where) {
    for (double x : A.data())
        if (!(x > 0) || !std::isfinite(x))
            throw Error(ErrorKind::DomainError, std::string(where) + ": matrix must be strictly positive");
}

// KeyedRng

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

KeyedRng::KeyedRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
    : state_(splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL))) {}

std::uint64_t KeyedRng::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double KeyedRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t KeyedRng::below(std::uint64_t bound) {
    // Rejection keeps the draw exactly uniform.
    std::uint64_t limit = bound ? (~std::uint64_t{0} - (~std::uint64_t{0} % bound)) : 0;
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return x % bound;
}

// Threads

namespace {
std::atomic<unsigned> g_default_threads{0};
}

unsigned default_threads() {
    unsigned t = g_default_threads.load();
    if (t) return t;
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_threads(unsigned threads) { g_default_threads.store(threads); }

void for_each_chunk(std::size_t chunks, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
    if (threads <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t c = next++; c < chunks; c = next++) body(c);
            } catch (...) {
                errors[w] = std::current_exception();
                next = chunks;
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace bpl
