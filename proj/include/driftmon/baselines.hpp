#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "driftmon/errors.hpp"

namespace driftmon {

// Hoeffding-bound detector over the classifier's correctness bits: drift when
// the windowed accuracy falls below the best accuracy seen by more than
// eps = sqrt(ln(1/delta) / (2 * window)).
class Fhddm {
public:
    struct Config {
        int window = 25;
        double delta = 1e-6;
    };

    Fhddm() : Fhddm(Config{}) {}
    explicit Fhddm(Config cfg) : cfg_(cfg) {}

    static double cut(const Config& cfg) {
        return std::sqrt(std::log(1.0 / cfg.delta) / (2.0 * cfg.window));
    }

    // Feed one correctness bit; returns true when drift is signaled. The
    // detector resets itself after signaling.
    bool update(bool correct) {
        bits_.push_back(correct ? 1 : 0);
        if (static_cast<int>(bits_.size()) > cfg_.window) bits_.pop_front();
        if (static_cast<int>(bits_.size()) < cfg_.window) return false;
        double sum = 0.0;
        for (int b : bits_) sum += b;
        const double p = sum / static_cast<double>(cfg_.window);
        if (p > p_max_) p_max_ = p;
        if (p_max_ - p >= cut(cfg_)) {
            reset();
            return true;
        }
        return false;
    }

    void reset() {
        bits_.clear();
        p_max_ = 0.0;
    }

    double best_accuracy() const { return p_max_; }
    const Config& config() const { return cfg_; }

private:
    Config cfg_;
    std::deque<int> bits_;
    double p_max_ = 0.0;
};

// Per-class recall monitor: each class keeps a decayed recall estimate and the
// best value it has reached; a class drifts when recall (plus one standard
// deviation of slack) falls below alpha_drift times its best.
class DdmOci {
public:
    struct Config {
        double recall_decay = 0.99;
        double alpha_warning = 0.95;
        double alpha_drift = 0.9;
        double min_effective = 10.0;  // observations of a class before it is judged
    };

    explicit DdmOci(int class_count) : DdmOci(class_count, Config{}) {}
    DdmOci(int class_count, Config cfg)
        : cfg_(cfg), state_(static_cast<std::size_t>(class_count)) {}

    struct Decision {
        std::vector<int> drifted;
        std::vector<int> warned;
    };

    Decision update(int predicted, int actual) {
        ClassState& s = state_.at(static_cast<std::size_t>(actual));
        const double hit = predicted == actual ? 1.0 : 0.0;
        s.n_eff = cfg_.recall_decay * s.n_eff + 1.0;
        s.recall += (hit - s.recall) / std::min(s.n_eff, 1.0 / (1.0 - cfg_.recall_decay));
        Decision d;
        if (s.n_eff >= cfg_.min_effective) {
            const double sd = std::sqrt(std::max(0.0, s.recall * (1.0 - s.recall)) / s.n_eff);
            if (s.recall > s.best_recall) {
                s.best_recall = s.recall;
                s.best_sd = sd;
            }
            if (s.best_recall > 0.0) {
                if (s.recall + sd < cfg_.alpha_drift * s.best_recall) {
                    d.drifted.push_back(actual);
                    s = ClassState{};  // re-learn this class's baseline
                } else if (s.recall + sd < cfg_.alpha_warning * s.best_recall) {
                    d.warned.push_back(actual);
                }
            }
        }
        return d;
    }

    double recall(int cls) const { return state_.at(static_cast<std::size_t>(cls)).recall; }
    double best_recall(int cls) const {
        return state_.at(static_cast<std::size_t>(cls)).best_recall;
    }

private:
    struct ClassState {
        double recall = 0.0;
        double n_eff = 0.0;
        double best_recall = 0.0;
        double best_sd = 0.0;
    };

    Config cfg_;
    std::vector<ClassState> state_;
};

// Confusion-matrix similarity monitor: keeps the previous and current window
// of confusion counts and signals drift when their weighted cosine similarity
// drops below the threshold.
class PerfSim {
public:
    struct Config {
        double tau = 0.95;
        double lambda = 0.2;      // weight split between diagonal and off-diagonal cells
        int window_batches = 5;   // batches per comparison window
    };

    explicit PerfSim(int class_count) : PerfSim(class_count, Config{}) {}
    PerfSim(int class_count, Config cfg)
        : cfg_(cfg),
          classes_(class_count),
          prev_(static_cast<std::size_t>(class_count) * class_count, 0.0),
          cur_(static_cast<std::size_t>(class_count) * class_count, 0.0) {}

    // Weighted cosine between two flattened confusion matrices; nullopt when
    // either matrix is all zeros.
    static std::optional<double> similarity(const std::vector<double>& x,
                                            const std::vector<double>& y, int classes,
                                            double lambda) {
        double dot = 0.0;
        double nx = 0.0;
        double ny = 0.0;
        for (int i = 0; i < classes; ++i) {
            for (int j = 0; j < classes; ++j) {
                const double wgt = i == j ? 1.0 - lambda : lambda;
                const double a = wgt * x[static_cast<std::size_t>(i) * classes + j];
                const double b = wgt * y[static_cast<std::size_t>(i) * classes + j];
                dot += a * b;
                nx += a * a;
                ny += b * b;
            }
        }
        if (nx <= 0.0 || ny <= 0.0) return std::nullopt;
        return dot / (std::sqrt(nx) * std::sqrt(ny));
    }

    void observe(int predicted, int actual) {
        cur_[static_cast<std::size_t>(actual) * classes_ + predicted] += 1.0;
    }

    struct Decision {
        bool evaluated = false;
        bool drift = false;
        double similarity = std::numeric_limits<double>::quiet_NaN();
    };

    // Call at the end of each batch; windows roll every `window_batches`.
    Decision finish_batch() {
        Decision d;
        if (++batches_in_window_ < cfg_.window_batches) return d;
        batches_in_window_ = 0;
        if (has_prev_) {
            if (auto sim = similarity(prev_, cur_, classes_, cfg_.lambda)) {
                d.evaluated = true;
                d.similarity = *sim;
                d.drift = *sim < cfg_.tau;
            }
        }
        prev_ = cur_;
        has_prev_ = true;
        std::fill(cur_.begin(), cur_.end(), 0.0);
        return d;
    }

    const Config& config() const { return cfg_; }

private:
    Config cfg_;
    int classes_;
    std::vector<double> prev_;
    std::vector<double> cur_;
    int batches_in_window_ = 0;
    bool has_prev_ = false;
};

}  // namespace driftmon
