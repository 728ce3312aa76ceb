#pragma once

#include <cmath>
#include <limits>

namespace enclosure {

/// Signed log-domain scalar: value = sign * exp(log_abs).
/// Carries quantities like e^{tau*T} * I that overflow double precision.
struct LogSigned {
    int sign = 0;  // -1, 0, +1
    double log_abs = -std::numeric_limits<double>::infinity();

    static LogSigned zero() { return {0, -std::numeric_limits<double>::infinity()}; }

    static LogSigned from_value(double v) {
        if (v == 0.0) return zero();
        return {v > 0.0 ? 1 : -1, std::log(std::fabs(v))};
    }

    /// value * exp(extra_log); keeps the product representable in log form.
    static LogSigned from_value_scaled(double v, double extra_log) {
        LogSigned r = from_value(v);
        if (r.sign != 0) r.log_abs += extra_log;
        return r;
    }

    double value() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_abs);
    }

    LogSigned operator*(const LogSigned& o) const {
        if (sign == 0 || o.sign == 0) return zero();
        return {sign * o.sign, log_abs + o.log_abs};
    }

    LogSigned operator+(const LogSigned& o) const {
        if (sign == 0) return o;
        if (o.sign == 0) return *this;
        const LogSigned& big = (log_abs >= o.log_abs) ? *this : o;
        const LogSigned& small = (log_abs >= o.log_abs) ? o : *this;
        const double d = small.log_abs - big.log_abs;  // <= 0
        if (big.sign == small.sign) {
            return {big.sign, big.log_abs + std::log1p(std::exp(d))};
        }
        const double m = -std::expm1(d);  // 1 - e^d in (0, 1]
        if (m == 0.0) return zero();
        return {big.sign, big.log_abs + std::log(m)};
    }
};

/// Streaming log-sum-exp accumulator for sums of positive terms given in log form.
class LogSumAccumulator {
  public:
    void add_log(double log_term) {
        if (log_term == -std::numeric_limits<double>::infinity()) return;
        if (empty_) {
            max_ = log_term;
            sum_ = 1.0;
            empty_ = false;
            return;
        }
        if (log_term <= max_) {
            sum_ += std::exp(log_term - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        }
    }

    /// log of the accumulated sum; -inf when nothing was added.
    double log_sum() const {
        if (empty_) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

  private:
    bool empty_ = true;
    double max_ = 0.0;
    double sum_ = 0.0;
};

}  // namespace enclosure
