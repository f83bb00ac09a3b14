#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

namespace driftmon {

struct ScoredExample {
    std::vector<double> scores;
    int truth = 0;
    int predicted = 0;
};

// Ring of the most recent (scores, truth, prediction) triples the prequential
// metrics are computed over.
class PrequentialWindow {
public:
    explicit PrequentialWindow(std::size_t capacity = 1000) : capacity_(capacity) {}

    void push(ScoredExample ex) {
        ring_.push_back(std::move(ex));
        if (ring_.size() > capacity_) ring_.pop_front();
    }

    std::size_t size() const { return ring_.size(); }
    std::size_t capacity() const { return capacity_; }
    const std::deque<ScoredExample>& entries() const { return ring_; }

private:
    std::size_t capacity_;
    std::deque<ScoredExample> ring_;
};

// Multi-class AUC: the mean over unordered class pairs (i, k) of the ranking
// AUC of the score difference s_i - s_k, restricted to examples of those two
// classes. Ties contribute half. Undefined with fewer than two classes
// present in the window.
inline std::optional<double> pm_auc(const PrequentialWindow& window) {
    const auto& entries = window.entries();
    if (entries.empty()) return std::nullopt;
    const int classes = static_cast<int>(entries.front().scores.size());
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(classes));
    for (std::size_t idx = 0; idx < entries.size(); ++idx) {
        by_class[static_cast<std::size_t>(entries[idx].truth)].push_back(idx);
    }

    double total = 0.0;
    int pairs = 0;
    std::vector<std::pair<double, int>> pool;  // (difference score, is first class)
    for (int i = 0; i < classes; ++i) {
        for (int k = i + 1; k < classes; ++k) {
            const auto& ex_i = by_class[static_cast<std::size_t>(i)];
            const auto& ex_k = by_class[static_cast<std::size_t>(k)];
            if (ex_i.empty() || ex_k.empty()) continue;
            pool.clear();
            pool.reserve(ex_i.size() + ex_k.size());
            for (std::size_t idx : ex_i) {
                const auto& s = entries[idx].scores;
                pool.emplace_back(s[static_cast<std::size_t>(i)] - s[static_cast<std::size_t>(k)], 1);
            }
            for (std::size_t idx : ex_k) {
                const auto& s = entries[idx].scores;
                pool.emplace_back(s[static_cast<std::size_t>(i)] - s[static_cast<std::size_t>(k)], 0);
            }
            std::sort(pool.begin(), pool.end());
            // Average ranks over ties, then the Mann-Whitney identity.
            double rank_sum_i = 0.0;
            std::size_t pos = 0;
            while (pos < pool.size()) {
                std::size_t end = pos;
                while (end + 1 < pool.size() && pool[end + 1].first == pool[pos].first) ++end;
                const double avg_rank = 0.5 * (static_cast<double>(pos + 1) + static_cast<double>(end + 1));
                for (std::size_t q = pos; q <= end; ++q) {
                    if (pool[q].second == 1) rank_sum_i += avg_rank;
                }
                pos = end + 1;
            }
            const double ni = static_cast<double>(ex_i.size());
            const double nk = static_cast<double>(ex_k.size());
            total += (rank_sum_i - ni * (ni + 1.0) / 2.0) / (ni * nk);
            ++pairs;
        }
    }
    if (pairs == 0) return std::nullopt;
    return total / static_cast<double>(pairs);
}

// Geometric mean of per-class recalls over the classes present in the window.
// A present class with zero recall pulls the value to zero.
inline std::optional<double> pm_gm(const PrequentialWindow& window) {
    const auto& entries = window.entries();
    if (entries.empty()) return std::nullopt;
    const int classes = static_cast<int>(entries.front().scores.size());
    std::vector<long> seen(static_cast<std::size_t>(classes), 0);
    std::vector<long> correct(static_cast<std::size_t>(classes), 0);
    for (const auto& ex : entries) {
        ++seen[static_cast<std::size_t>(ex.truth)];
        if (ex.predicted == ex.truth) ++correct[static_cast<std::size_t>(ex.truth)];
    }
    double log_sum = 0.0;
    int present = 0;
    for (int m = 0; m < classes; ++m) {
        if (seen[static_cast<std::size_t>(m)] == 0) continue;
        ++present;
        const double recall = static_cast<double>(correct[static_cast<std::size_t>(m)]) /
                              static_cast<double>(seen[static_cast<std::size_t>(m)]);
        if (recall <= 0.0) return 0.0;
        log_sum += std::log(recall);
    }
    if (present == 0) return std::nullopt;
    return std::exp(log_sum / static_cast<double>(present));
}

}  // namespace driftmon
