#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "driftmon/errors.hpp"

namespace driftmon {

struct WindowConfig {
    int min_window = 8;
    int max_window = 200;
    double delta = 0.002;  // confidence of the adaptive-window cut
};

// Per-class incremental least-squares state over a sliding window of
// (batch index, reconstruction error) pairs. The window length adapts:
// it grows while the error series looks stationary and collapses to the
// recent sub-window when two sub-windows disagree by more than a
// Hoeffding-style cut.
class TrendTracker {
public:
    TrendTracker(int class_count, WindowConfig cfg = {})
        : cfg_(cfg), state_(static_cast<std::size_t>(class_count)) {
        for (auto& s : state_) s.window = cfg_.min_window;
    }

    // Appends (t, value) for class `cls` and evicts pairs beyond the current
    // window, keeping the running sums in step.
    void update(int cls, long t, double value) {
        ClassTrend& s = at(cls);
        if (t <= s.last_t) {
            throw SequencingError("trend updates must have increasing batch indices");
        }
        s.last_t = t;
        s.ring.emplace_back(t, value);
        const double td = static_cast<double>(t);
        s.sum_tr += td * value;
        s.sum_t += td;
        s.sum_r += value;
        s.sum_t2 += td * td;
        shrink_to_window(s);
    }

    // Least-squares slope over the retained pairs, or nothing when fewer than
    // two points are available.
    std::optional<double> slope(int cls) const {
        const ClassTrend& s = at(cls);
        const double n = static_cast<double>(s.ring.size());
        if (s.ring.size() < 2) return std::nullopt;
        const double denom = n * s.sum_t2 - s.sum_t * s.sum_t;
        if (denom == 0.0) return std::nullopt;
        return (n * s.sum_tr - s.sum_t * s.sum_r) / denom;
    }

    // One adaptation step. Scans every split of the retained series into an
    // old and a new sub-window; if some split's means differ by more than
    // eps = sqrt(ln(4 n / delta) / (2 m_h)), with m_h the harmonic mean of the
    // sub-window sizes, the old side of the widest-gap split is dropped and
    // the window shrinks to what remains. Otherwise the window grows by one.
    void adapt(int cls) {
        ClassTrend& s = at(cls);
        bool dropped = false;
        while (s.ring.size() >= 2) {
            const std::size_t n = s.ring.size();
            std::vector<double> prefix(n + 1, 0.0);
            for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + s.ring[i].second;
            const double total = prefix[n];
            const double log_term = std::log(4.0 * static_cast<double>(n) / cfg_.delta);
            std::size_t cut_at = 0;
            double best_excess = 0.0;
            for (std::size_t i = 1; i < n; ++i) {
                const double n0 = static_cast<double>(i);
                const double n1 = static_cast<double>(n - i);
                const double mean0 = prefix[i] / n0;
                const double mean1 = (total - prefix[i]) / n1;
                const double harmonic = 2.0 * n0 * n1 / (n0 + n1);
                const double eps = std::sqrt(log_term / (2.0 * harmonic));
                const double excess = std::fabs(mean0 - mean1) - eps;
                if (excess > best_excess) {
                    best_excess = excess;
                    cut_at = i;
                }
            }
            if (cut_at == 0) break;
            for (std::size_t i = 0; i < cut_at; ++i) pop_front(s);
            dropped = true;
        }
        if (dropped) {
            s.window = std::max(cfg_.min_window, static_cast<int>(s.ring.size()));
        } else {
            s.window = std::min(s.window + 1, cfg_.max_window);
        }
    }

    long effective_count(int cls) const { return static_cast<long>(at(cls).ring.size()); }
    int window(int cls) const { return at(cls).window; }
    const std::deque<std::pair<long, double>>& history(int cls) const { return at(cls).ring; }

    void reset(int cls) {
        ClassTrend& s = at(cls);
        s = ClassTrend{};
        s.window = cfg_.min_window;
    }

    int class_count() const { return static_cast<int>(state_.size()); }
    const WindowConfig& config() const { return cfg_; }

private:
    struct ClassTrend {
        double sum_tr = 0.0;
        double sum_t = 0.0;
        double sum_r = 0.0;
        double sum_t2 = 0.0;
        long last_t = -1;
        int window = 8;
        std::deque<std::pair<long, double>> ring;
    };

    ClassTrend& at(int cls) { return state_.at(static_cast<std::size_t>(cls)); }
    const ClassTrend& at(int cls) const { return state_.at(static_cast<std::size_t>(cls)); }

    void pop_front(ClassTrend& s) {
        const auto [t, value] = s.ring.front();
        s.ring.pop_front();
        const double td = static_cast<double>(t);
        s.sum_tr -= td * value;
        s.sum_t -= td;
        s.sum_r -= value;
        s.sum_t2 -= td * td;
    }

    void shrink_to_window(ClassTrend& s) {
        while (static_cast<int>(s.ring.size()) > s.window) pop_front(s);
    }

    WindowConfig cfg_;
    std::vector<ClassTrend> state_;
};

}  // namespace driftmon
