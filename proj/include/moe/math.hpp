#ifndef MOE_MATH_HPP
#define MOE_MATH_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace moe {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

inline double log_sum_exp(std::span<const double> x) {
    double mx = kNegInf;
    for (double v : x) mx = std::max(mx, v);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double v : x) s += std::exp(v - mx);
    return mx + std::log(s);
}

inline double log_normal_pdf(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

inline double log_half_normal_pdf(double x, double scale) {
    if (x < 0.0) return kNegInf;
    return 0.5 * std::numbers::ln2 - 0.5 * kLogTwoPi - std::log(scale)
           - 0.5 * x * x / (scale * scale);
}

// Gamma(shape, rate 1) log-density.
inline double log_gamma_pdf(double x, double shape) {
    if (x <= 0.0) return kNegInf;
    return (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
}

// Same density expressed through log(x); stays finite when x underflows.
inline double log_gamma_pdf_from_log(double log_x, double shape) {
    return (shape - 1.0) * log_x - std::exp(log_x) - std::lgamma(shape);
}

// Streaming log-sum-exp accumulator (used for per-grid-cell mixtures).
struct LogSumExpAcc {
    double mx = kNegInf;
    double sum = 0.0;

    void add(double v) {
        if (v == kNegInf) return;
        if (v <= mx) {
            sum += std::exp(v - mx);
        } else {
            sum = sum * std::exp(mx - v) + 1.0;
            mx = v;
        }
    }
    double value() const {
        return (sum > 0.0) ? mx + std::log(sum) : kNegInf;
    }
};

}  // namespace moe

#endif
