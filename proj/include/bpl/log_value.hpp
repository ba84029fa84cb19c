#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace bpl {

// Nonnegative quantity stored as its natural log. Zero is a distinguished
// state with log() == -inf.
class LogValue {
public:
    LogValue() = default;

    static LogValue zero() { return LogValue(); }
    static LogValue one() { return from_log(0.0); }
    static LogValue from_log(double log_value);
    static LogValue from_linear(double value);
    static LogValue from_linear(long double value);

    bool is_zero() const { return zero_; }
    double log() const { return zero_ ? -std::numeric_limits<double>::infinity() : log_; }
    // May overflow to inf; callers that care should stay in logs.
    double value() const { return zero_ ? 0.0 : std::exp(log_); }

    LogValue operator*(const LogValue& o) const;
    LogValue operator/(const LogValue& o) const;
    LogValue operator+(const LogValue& o) const;
    LogValue pow(double exponent) const;
    LogValue root(int degree) const { return pow(1.0 / degree); }

    bool operator==(const LogValue& o) const { return log() == o.log(); }
    bool operator<(const LogValue& o) const { return log() < o.log(); }
    bool operator<=(const LogValue& o) const { return log() <= o.log(); }
    bool operator>(const LogValue& o) const { return log() > o.log(); }

private:
    double log_ = 0.0;
    bool zero_ = true;
};

// log(sum exp(x_i)) in the order given; -inf entries are skipped.
double log_sum_exp(std::span<const double> logs);

// |log a - log b|, with 0 when both are zero and inf when exactly one is.
double log_distance(const LogValue& a, const LogValue& b);

}  // namespace bpl
