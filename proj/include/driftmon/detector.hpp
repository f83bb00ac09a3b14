#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "driftmon/granger.hpp"
#include "driftmon/rbm.hpp"
#include "driftmon/rng.hpp"
#include "driftmon/stream.hpp"
#include "driftmon/trend.hpp"

namespace driftmon {

// Mean-field reconstruction of one normalized instance: the hidden layer is
// taken as P(h | v = x, z = one_hot(y)), then features and label are read
// back as P(v | h) and P(z | h). Deterministic.
inline std::pair<std::vector<double>, std::vector<double>> reconstruct(const Instance& instance,
                                                                       const RbmParameters& p) {
    const std::vector<double> z = one_hot(instance.label, p.classes);
    const std::vector<double> h = hidden_activation(instance.features, z, p);
    return {visible_activation(h, p), class_activation(h, p)};
}

// Euclidean distance between (features, one-hot label) and its reconstruction.
inline double reconstruction_error(const Instance& instance, const RbmParameters& p) {
    const auto [x_hat, y_hat] = reconstruct(instance, p);
    double sum = 0.0;
    for (std::size_t i = 0; i < x_hat.size(); ++i) {
        const double d = instance.features[i] - x_hat[i];
        sum += d * d;
    }
    for (int k = 0; k < p.classes; ++k) {
        const double truth = k == instance.label ? 1.0 : 0.0;
        const double d = truth - y_hat[static_cast<std::size_t>(k)];
        sum += d * d;
    }
    return std::sqrt(sum);
}

// Mean reconstruction error per class over one batch. Classes without
// instances in the batch are absent (presence 0), not zero-error.
struct ReconstructionRecord {
    long t = 0;
    std::vector<double> per_class_error;  // meaningful only where presence > 0
    std::vector<int> presence;

    bool present(int cls) const { return presence[static_cast<std::size_t>(cls)] > 0; }
};

inline ReconstructionRecord batch_class_error(const MiniBatch& batch, const RbmParameters& p) {
    if (batch.empty()) throw TrainingError("reconstruction of an empty batch");
    ReconstructionRecord rec;
    rec.t = batch.t;
    rec.per_class_error.assign(static_cast<std::size_t>(p.classes), 0.0);
    rec.presence.assign(static_cast<std::size_t>(p.classes), 0);
    for (const Instance& inst : batch.instances) {
        rec.per_class_error[static_cast<std::size_t>(inst.label)] += reconstruction_error(inst, p);
        ++rec.presence[static_cast<std::size_t>(inst.label)];
    }
    for (int m = 0; m < p.classes; ++m) {
        if (rec.presence[static_cast<std::size_t>(m)] > 0) {
            rec.per_class_error[static_cast<std::size_t>(m)] /=
                static_cast<double>(rec.presence[static_cast<std::size_t>(m)]);
        }
    }
    return rec;
}

struct ClassDecision {
    bool tested = false;
    bool drift = false;
    double statistic = std::numeric_limits<double>::quiet_NaN();
    double p_value = std::numeric_limits<double>::quiet_NaN();
};

struct DriftReport {
    long t = 0;
    std::vector<ClassDecision> classes;

    bool any_drift() const {
        for (const auto& c : classes) {
            if (c.drift) return true;
        }
        return false;
    }
};

struct RbmDetectorConfig {
    RbmHyperparams rbm;
    WindowConfig window;
    int granger_lag = 1;
    double granger_alpha = 0.05;
    // Number of recent slopes the causality test sees; 0 picks
    // 2 * max(8, 2 * (lag + 2)) to keep both halves workable.
    int trend_ring = 0;
    // Fresh slope appends required between tests of the same class. The
    // default of half a ring makes consecutive tests compare disjoint halves.
    int test_stride = 0;
    int warm_epochs = 20;
    double class_decay = 0.999;

    int ring_length() const {
        if (trend_ring > 0) return trend_ring;
        return 2 * std::max(8, 2 * (granger_lag + 2));
    }
    int stride() const { return test_stride > 0 ? test_stride : ring_length() / 2; }
};

// Drift detector built around the continuously trained reconstruction model.
// Per batch it: scores reconstruction error per class, feeds per-class trend
// state, tests whether the older trend still forecasts the newer one, and
// finally trains the model on the batch. A drifted class has only its trend
// state reset; the model itself keeps adapting.
class RbmDetector {
public:
    RbmDetector(RbmDetectorConfig cfg, std::uint64_t seed)
        : cfg_(cfg), rng_(seed) {}

    bool warmed() const { return warmed_; }
    int class_count() const { return class_count_; }

    // Fixes normalization ranges on the first batch, initializes parameters
    // and trains for `warm_epochs` passes over that batch.
    void warm_start(const MiniBatch& raw_first, int class_count) {
        if (raw_first.empty()) throw TrainingError("warm start needs a non-empty batch");
        class_count_ = class_count;
        schema_ = StreamSchema::fit(raw_first, class_count);
        params_ = init_parameters(schema_, cfg_.rbm, rng_);
        stats_.emplace(class_count, cfg_.class_decay);
        trend_.emplace(class_count, cfg_.window);
        slopes_.assign(static_cast<std::size_t>(class_count), {});
        fresh_slopes_.assign(static_cast<std::size_t>(class_count), 0);

        const MiniBatch batch = normalized(raw_first);
        for (const Instance& inst : batch.instances) stats_->update(inst.label);
        for (int epoch = 0; epoch < cfg_.warm_epochs; ++epoch) train_on(batch);
        warmed_ = true;
    }

    // Score-then-train on one batch; returns the per-class decisions.
    DriftReport process_batch(const MiniBatch& raw) {
        if (!warmed_) throw SequencingError("process_batch before warm_start");
        if (raw.empty()) throw TrainingError("empty batch");
        ++batches_seen_;
        const MiniBatch batch = normalized(raw);

        DriftReport report;
        report.t = batches_seen_;
        report.classes.assign(static_cast<std::size_t>(class_count_), {});

        const ReconstructionRecord rec = batch_class_error(batch, params_);
        for (int m = 0; m < class_count_; ++m) {
            if (!rec.present(m)) continue;
            trend_->update(m, batches_seen_, rec.per_class_error[static_cast<std::size_t>(m)]);
            trend_->adapt(m);
            if (auto q = trend_->slope(m)) {
                auto& ring = slopes_[static_cast<std::size_t>(m)];
                ring.push_back(*q);
                while (static_cast<int>(ring.size()) > cfg_.ring_length()) ring.pop_front();
                ++fresh_slopes_[static_cast<std::size_t>(m)];
            }
        }

        for (int m = 0; m < class_count_; ++m) {
            auto& ring = slopes_[static_cast<std::size_t>(m)];
            if (static_cast<int>(ring.size()) < cfg_.ring_length()) continue;
            if (fresh_slopes_[static_cast<std::size_t>(m)] < cfg_.stride()) continue;
            const std::vector<double> series(ring.begin(), ring.end());
            const GrangerOutcome outcome =
                granger_drift_test(series, cfg_.granger_lag, cfg_.granger_alpha);
            if (outcome.decision == DriftDecision::kInsufficient) continue;
            auto& decision = report.classes[static_cast<std::size_t>(m)];
            decision.tested = true;
            decision.statistic = outcome.f_stat;
            decision.p_value = outcome.p_value;
            fresh_slopes_[static_cast<std::size_t>(m)] = 0;
            if (outcome.decision == DriftDecision::kDrift) {
                decision.drift = true;
                reset_class_trend(m);
            }
        }

        for (const Instance& inst : batch.instances) stats_->update(inst.label);
        train_on(batch);
        return report;
    }

    // Mean reconstruction error of a raw batch under the current parameters.
    double average_error(const MiniBatch& raw) const {
        const MiniBatch batch = normalized(raw);
        double sum = 0.0;
        for (const Instance& inst : batch.instances) sum += reconstruction_error(inst, params_);
        return sum / static_cast<double>(batch.size());
    }

    const RbmParameters& parameters() const { return params_; }
    const StreamSchema& schema() const { return schema_; }
    const ClassStats& class_stats() const { return *stats_; }
    const TrendTracker& trend() const { return *trend_; }
    long batches_seen() const { return batches_seen_; }

private:
    MiniBatch normalized(const MiniBatch& raw) const {
        MiniBatch batch;
        batch.t = raw.t;
        batch.instances.reserve(raw.size());
        for (const Instance& inst : raw.instances) {
            batch.instances.push_back(
                Instance{normalize(inst.features, schema_), inst.label, inst.seq});
        }
        return batch;
    }

    void train_on(const MiniBatch& batch) {
        const ClassBalanceState balance{stats_->decayed_counts(), cfg_.rbm.beta};
        const GradientEstimate g = batch_gradient(batch, params_, cfg_.rbm, balance, rng_);
        apply_update(params_, g, cfg_.rbm.learning_rate);
    }

    void reset_class_trend(int m) {
        trend_->reset(m);
        slopes_[static_cast<std::size_t>(m)].clear();
        fresh_slopes_[static_cast<std::size_t>(m)] = 0;
    }

    RbmDetectorConfig cfg_;
    Rng rng_;
    int class_count_ = 0;
    bool warmed_ = false;
    long batches_seen_ = 0;
    StreamSchema schema_;
    RbmParameters params_;
    std::optional<ClassStats> stats_;
    std::optional<TrendTracker> trend_;
    std::vector<std::deque<double>> slopes_;
    std::vector<int> fresh_slopes_;
};

}  // namespace driftmon
