#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "driftmon/stats.hpp"

namespace driftmon {

enum class DriftDecision { kStable, kDrift, kInsufficient };

struct GrangerOutcome {
    DriftDecision decision = DriftDecision::kInsufficient;
    double f_stat = std::numeric_limits<double>::quiet_NaN();
    double p_value = std::numeric_limits<double>::quiet_NaN();
    int observations = 0;
};

namespace detail {

// Gaussian elimination with partial pivoting on the (n x n | rhs) system.
// Returns false when the system is numerically singular.
inline bool solve_linear(std::vector<double> m, std::vector<double>& rhs, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::fabs(m[static_cast<std::size_t>(r) * n + col]) >
                std::fabs(m[static_cast<std::size_t>(pivot) * n + col])) {
                pivot = r;
            }
        }
        if (std::fabs(m[static_cast<std::size_t>(pivot) * n + col]) < 1e-12) return false;
        if (pivot != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(m[static_cast<std::size_t>(col) * n + c],
                          m[static_cast<std::size_t>(pivot) * n + c]);
            }
            std::swap(rhs[static_cast<std::size_t>(col)], rhs[static_cast<std::size_t>(pivot)]);
        }
        const double diag = m[static_cast<std::size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double factor = m[static_cast<std::size_t>(r) * n + col] / diag;
            if (factor == 0.0) continue;
            for (int c = col; c < n; ++c) {
                m[static_cast<std::size_t>(r) * n + c] -=
                    factor * m[static_cast<std::size_t>(col) * n + c];
            }
            rhs[static_cast<std::size_t>(r)] -= factor * rhs[static_cast<std::size_t>(col)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = rhs[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c) {
            s -= m[static_cast<std::size_t>(r) * n + c] * rhs[static_cast<std::size_t>(c)];
        }
        rhs[static_cast<std::size_t>(r)] = s / m[static_cast<std::size_t>(r) * n + r];
    }
    return true;
}

// Residual sum of squares of y regressed on the given design rows via the
// normal equations. Returns false on a singular design.
inline bool ols_rss(const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
                   double& rss_out) {
    const int n = static_cast<int>(rows.size());
    const int d = static_cast<int>(rows.front().size());
    std::vector<double> gram(static_cast<std::size_t>(d) * d, 0.0);
    std::vector<double> moment(static_cast<std::size_t>(d), 0.0);
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < d; ++i) {
            moment[static_cast<std::size_t>(i)] +=
                rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] *
                y[static_cast<std::size_t>(r)];
            for (int j = 0; j < d; ++j) {
                gram[static_cast<std::size_t>(i) * d + j] +=
                    rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] *
                    rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
            }
        }
    }
    if (!solve_linear(gram, moment, d)) return false;
    double rss = 0.0;
    for (int r = 0; r < n; ++r) {
        double fit = 0.0;
        for (int i = 0; i < d; ++i) {
            fit += rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] *
                   moment[static_cast<std::size_t>(i)];
        }
        const double res = y[static_cast<std::size_t>(r)] - fit;
        rss += res * res;
    }
    rss_out = rss;
    return true;
}

}  // namespace detail

// Causality check between the older and newer half of a trend series. Both
// halves are first-differenced; the newer half's differences are regressed on
// their own `lag` lags (restricted) and additionally on `lag` lags of the
// older half's differences at the same relative position (unrestricted). The
// F test asks whether the older trend still forecasts the newer one; when it
// does not (p > alpha), the series is declared drifted.
inline GrangerOutcome granger_drift_test(std::span<const double> series, int lag, double alpha) {
    GrangerOutcome out;
    const std::size_t n = series.size();
    const std::size_t min_len = 2 * static_cast<std::size_t>(lag + 2);
    if (lag < 1 || n < min_len) return out;
    const std::size_t half = n / 2;
    std::span<const double> prev = series.subspan(n - 2 * half, half);
    std::span<const double> cur = series.subspan(n - half, half);

    std::vector<double> d_prev(half - 1);
    std::vector<double> d_cur(half - 1);
    for (std::size_t i = 0; i + 1 < half; ++i) {
        d_prev[i] = prev[i + 1] - prev[i];
        d_cur[i] = cur[i + 1] - cur[i];
    }
    constexpr double kDegenerate = 1e-18;
    if (variance(d_prev) <= kDegenerate || variance(d_cur) <= kDegenerate) return out;

    const int diffs = static_cast<int>(half) - 1;
    const int n_obs = diffs - lag;
    const int df2 = n_obs - 2 * lag - 1;
    if (n_obs < 1 || df2 < 1) return out;

    std::vector<std::vector<double>> restricted;
    std::vector<std::vector<double>> unrestricted;
    std::vector<double> target;
    restricted.reserve(static_cast<std::size_t>(n_obs));
    unrestricted.reserve(static_cast<std::size_t>(n_obs));
    target.reserve(static_cast<std::size_t>(n_obs));
    for (int t = lag; t < diffs; ++t) {
        std::vector<double> row_r;
        row_r.reserve(1 + static_cast<std::size_t>(lag));
        row_r.push_back(1.0);
        for (int l = 1; l <= lag; ++l) row_r.push_back(d_cur[static_cast<std::size_t>(t - l)]);
        std::vector<double> row_u = row_r;
        for (int l = 1; l <= lag; ++l) row_u.push_back(d_prev[static_cast<std::size_t>(t - l)]);
        restricted.push_back(std::move(row_r));
        unrestricted.push_back(std::move(row_u));
        target.push_back(d_cur[static_cast<std::size_t>(t)]);
    }

    double rss_r = 0.0;
    double rss_u = 0.0;
    if (!detail::ols_rss(restricted, target, rss_r) ||
        !detail::ols_rss(unrestricted, target, rss_u)) {
        return out;
    }
    double num = (rss_r - rss_u) / static_cast<double>(lag);
    if (num < 0.0) num = 0.0;  // rounding can make the nested RSS non-monotone
    const double den = rss_u / static_cast<double>(df2);
    double f = 0.0;
    if (den > 0.0) {
        f = num / den;
    } else {
        f = num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    out.f_stat = f;
    out.p_value = fisher_f_sf(f, static_cast<double>(lag), static_cast<double>(df2));
    out.observations = n_obs;
    out.decision = out.p_value > alpha ? DriftDecision::kDrift : DriftDecision::kStable;
    return out;
}

}  // namespace driftmon
