#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace driftmon {

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

// In-place softmax with max subtraction.
inline void softmax_inplace(std::span<double> logits) {
    if (logits.empty()) return;
    double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : logits) v /= sum;
}

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 400;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// Survival function of the F distribution with (d1, d2) degrees of freedom.
inline double fisher_f_sf(double f, double d1, double d2) {
    if (!(f > 0.0)) return 1.0;
    if (!std::isfinite(f)) return 0.0;
    const double x = d2 / (d2 + d1 * f);
    return regularized_incomplete_beta(0.5 * d2, 0.5 * d1, x);
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double v : xs) s += v;
    return s / static_cast<double>(xs.size());
}

inline double variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double v : xs) s += (v - m) * (v - m);
    return s / static_cast<double>(xs.size() - 1);
}

}  // namespace driftmon
