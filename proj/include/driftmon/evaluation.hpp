#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "driftmon/baselines.hpp"
#include "driftmon/classifier.hpp"
#include "driftmon/detector.hpp"
#include "driftmon/metrics.hpp"
#include "driftmon/stream.hpp"

namespace driftmon {

// One detector verdict, keyed by harness batch index. class_id -1 means the
// detector only speaks about the stream as a whole.
struct DetectionEvent {
    long t = 0;
    int class_id = -1;
    bool drift = false;
    double statistic = std::numeric_limits<double>::quiet_NaN();
    double p_value = std::numeric_limits<double>::quiet_NaN();
};

// Uniform face the harness drives: per-instance predictions flow into
// observe_prediction, the raw batch arrives once per batch via finish_batch.
class DetectorAdapter {
public:
    virtual ~DetectorAdapter() = default;
    virtual std::string_view name() const = 0;
    virtual void observe_prediction(int /*predicted*/, int /*actual*/) {}
    virtual std::vector<DetectionEvent> finish_batch(const MiniBatch& raw, long t) = 0;
    // Whether drift events carry a usable class attribution.
    virtual bool per_class() const { return false; }
};

class RbmAdapter final : public DetectorAdapter {
public:
    RbmAdapter(RbmDetectorConfig cfg, std::uint64_t seed, int class_count)
        : detector_(cfg, seed), class_count_(class_count) {}

    std::string_view name() const override { return "rbm"; }
    bool per_class() const override { return true; }

    std::vector<DetectionEvent> finish_batch(const MiniBatch& raw, long t) override {
        std::vector<DetectionEvent> events;
        if (!detector_.warmed()) {
            detector_.warm_start(raw, class_count_);
            return events;
        }
        const DriftReport report = detector_.process_batch(raw);
        for (int m = 0; m < class_count_; ++m) {
            const ClassDecision& d = report.classes[static_cast<std::size_t>(m)];
            if (!d.tested) continue;
            events.push_back({t, m, d.drift, d.statistic, d.p_value});
        }
        return events;
    }

    const RbmDetector& detector() const { return detector_; }

private:
    RbmDetector detector_;
    int class_count_;
};

class FhddmAdapter final : public DetectorAdapter {
public:
    explicit FhddmAdapter(Fhddm::Config cfg = {}) : detector_(cfg) {}

    std::string_view name() const override { return "fhddm"; }

    void observe_prediction(int predicted, int actual) override {
        if (detector_.update(predicted == actual)) fired_ = true;
    }

    std::vector<DetectionEvent> finish_batch(const MiniBatch&, long t) override {
        std::vector<DetectionEvent> events;
        if (fired_) {
            fired_ = false;
            events.push_back({t, -1, true, detector_.best_accuracy(),
                              std::numeric_limits<double>::quiet_NaN()});
        }
        return events;
    }

private:
    Fhddm detector_;
    bool fired_ = false;
};

class DdmOciAdapter final : public DetectorAdapter {
public:
    DdmOciAdapter(int class_count, DdmOci::Config cfg = {}) : detector_(class_count, cfg) {}

    std::string_view name() const override { return "ddm-oci"; }
    bool per_class() const override { return true; }

    void observe_prediction(int predicted, int actual) override {
        const DdmOci::Decision d = detector_.update(predicted, actual);
        for (int cls : d.drifted) drifted_.insert(cls);
    }

    std::vector<DetectionEvent> finish_batch(const MiniBatch&, long t) override {
        std::vector<DetectionEvent> events;
        for (int cls : drifted_) {
            events.push_back({t, cls, true, detector_.recall(cls),
                              std::numeric_limits<double>::quiet_NaN()});
        }
        drifted_.clear();
        return events;
    }

private:
    DdmOci detector_;
    std::set<int> drifted_;
};

class PerfSimAdapter final : public DetectorAdapter {
public:
    PerfSimAdapter(int class_count, PerfSim::Config cfg = {}) : detector_(class_count, cfg) {}

    std::string_view name() const override { return "perfsim"; }

    void observe_prediction(int predicted, int actual) override {
        detector_.observe(predicted, actual);
    }

    std::vector<DetectionEvent> finish_batch(const MiniBatch&, long t) override {
        std::vector<DetectionEvent> events;
        const PerfSim::Decision d = detector_.finish_batch();
        if (d.evaluated && d.drift) {
            events.push_back({t, -1, true, d.similarity,
                              std::numeric_limits<double>::quiet_NaN()});
        }
        return events;
    }

private:
    PerfSim detector_;
};

// Fires exactly at the configured batches; a reference point for the harness.
class OracleAdapter final : public DetectorAdapter {
public:
    explicit OracleAdapter(std::vector<long> fire_at) : fire_at_(std::move(fire_at)) {}

    std::string_view name() const override { return "oracle"; }

    std::vector<DetectionEvent> finish_batch(const MiniBatch&, long t) override {
        std::vector<DetectionEvent> events;
        if (std::find(fire_at_.begin(), fire_at_.end(), t) != fire_at_.end()) {
            events.push_back({t, -1, true, 0.0, 0.0});
        }
        return events;
    }

private:
    std::vector<long> fire_at_;
};

class SilentAdapter final : public DetectorAdapter {
public:
    std::string_view name() const override { return "none"; }
    std::vector<DetectionEvent> finish_batch(const MiniBatch&, long) override { return {}; }
};

// Generator-side truth for scoring a detector.
struct GroundTruthDrift {
    long batch = 0;
    std::vector<int> affected;
};

struct DetectionLog {
    std::string detector;
    std::vector<DetectionEvent> events;  // all test records, drift or stable
    std::vector<GroundTruthDrift> truth;
    long total_batches = 0;

    std::vector<DetectionEvent> drift_events() const {
        std::vector<DetectionEvent> out;
        for (const auto& e : events) {
            if (e.drift) out.push_back(e);
        }
        return out;
    }
};

struct MetricRow {
    long t = 0;
    double pm_auc = std::numeric_limits<double>::quiet_NaN();
    double pm_gm = std::numeric_limits<double>::quiet_NaN();
    int drift_flag = 0;
};

struct RunResult {
    std::vector<MetricRow> metrics;
    DetectionLog log;
};

struct RunOptions {
    int batch_size = 50;
    long max_batches = 0;  // 0 -> exhaust the stream
    std::size_t metric_window = 1000;
    double class_decay = 0.999;
    double cost_cap = 100.0;
    bool per_class_reset = true;  // reset only the flagged class's weights
};

// Test-then-train loop: every instance is scored before the classifier learns
// from it; the detector sees the batch afterwards, and its drift verdicts
// reset the classifier (per class when attribution is available).
template <class Source>
RunResult run_prequential(Source& stream, DetectorAdapter& detector, const RunOptions& opts,
                          int class_count, std::vector<GroundTruthDrift> truth = {}) {
    RunResult result;
    result.log.detector = std::string(detector.name());
    result.log.truth = std::move(truth);

    PrequentialWindow window(opts.metric_window);
    std::optional<LinearClassifier> classifier;
    std::optional<ClassStats> stats;
    std::optional<StreamSchema> schema;

    long t = 0;
    while (opts.max_batches == 0 || t < opts.max_batches) {
        MiniBatch batch;
        batch.t = t + 1;
        batch.instances.reserve(static_cast<std::size_t>(opts.batch_size));
        while (static_cast<int>(batch.instances.size()) < opts.batch_size) {
            auto inst = stream.next();
            if (!inst) break;
            batch.instances.push_back(std::move(*inst));
        }
        if (batch.empty()) break;
        ++t;

        if (!classifier) {
            const int d = static_cast<int>(batch.instances.front().features.size());
            classifier.emplace(d, class_count, opts.cost_cap);
            stats.emplace(class_count, opts.class_decay);
            schema = StreamSchema::fit(batch, class_count);
        }

        for (const Instance& inst : batch.instances) {
            const std::vector<double> x = normalize(inst.features, *schema);
            auto [predicted, scores] = classifier->predict(x);
            window.push({scores, inst.label, predicted});
            detector.observe_prediction(predicted, inst.label);
            stats->update(inst.label);
            const std::vector<double> priors = stats->decayed_priors();
            classifier->learn(x, inst.label, priors);
        }

        const std::vector<DetectionEvent> events = detector.finish_batch(batch, t);
        int fired = 0;
        for (const DetectionEvent& e : events) {
            result.log.events.push_back(e);
            if (!e.drift) continue;
            fired = 1;
            if (opts.per_class_reset && detector.per_class() && e.class_id >= 0) {
                classifier->reset_class(e.class_id);
            } else {
                classifier->reset_all();
            }
        }

        MetricRow row;
        row.t = t;
        row.pm_auc = pm_auc(window).value_or(std::numeric_limits<double>::quiet_NaN());
        row.pm_gm = pm_gm(window).value_or(std::numeric_limits<double>::quiet_NaN());
        row.drift_flag = fired;
        result.metrics.push_back(row);
    }
    result.log.total_batches = t;
    return result;
}

struct DetectionMetrics {
    int hits = 0;
    int misses = 0;
    int false_alarms = 0;
    double mean_delay = std::numeric_limits<double>::quiet_NaN();
    double false_alarms_per_100 = 0.0;
    double miss_rate = std::numeric_limits<double>::quiet_NaN();
    double attribution_precision = std::numeric_limits<double>::quiet_NaN();
    double attribution_recall = std::numeric_limits<double>::quiet_NaN();
};

// Scores drift events against the generator's schedule. An event within
// `horizon` batches after a true drift is a hit (the first one sets the
// delay); events outside every horizon are false alarms. Attribution compares
// the classes flagged inside the horizon with the truly affected ones.
inline DetectionMetrics detection_metrics(const DetectionLog& log, long horizon = 50) {
    DetectionMetrics out;
    const std::vector<DetectionEvent> drifts = log.drift_events();
    double delay_sum = 0.0;
    long attr_flagged = 0;
    long attr_correct = 0;
    long attr_affected = 0;
    std::vector<bool> consumed(drifts.size(), false);

    for (const GroundTruthDrift& truth : log.truth) {
        bool hit = false;
        std::set<int> flagged;
        for (std::size_t i = 0; i < drifts.size(); ++i) {
            const DetectionEvent& e = drifts[i];
            if (e.t < truth.batch || e.t > truth.batch + horizon) continue;
            consumed[i] = true;
            if (!hit) {
                hit = true;
                delay_sum += static_cast<double>(e.t - truth.batch);
            }
            if (e.class_id >= 0) flagged.insert(e.class_id);
        }
        if (hit) {
            ++out.hits;
        } else {
            ++out.misses;
        }
        attr_affected += static_cast<long>(truth.affected.size());
        attr_flagged += static_cast<long>(flagged.size());
        for (int cls : truth.affected) {
            if (flagged.count(cls) > 0) ++attr_correct;
        }
    }
    for (std::size_t i = 0; i < drifts.size(); ++i) {
        if (!consumed[i]) ++out.false_alarms;
    }

    if (out.hits > 0) out.mean_delay = delay_sum / out.hits;
    if (!log.truth.empty()) {
        out.miss_rate = static_cast<double>(out.misses) / static_cast<double>(log.truth.size());
    }
    if (log.total_batches > 0) {
        out.false_alarms_per_100 =
            100.0 * static_cast<double>(out.false_alarms) / static_cast<double>(log.total_batches);
    }
    if (attr_flagged > 0) {
        out.attribution_precision =
            static_cast<double>(attr_correct) / static_cast<double>(attr_flagged);
    }
    if (attr_affected > 0) {
        out.attribution_recall =
            static_cast<double>(attr_correct) / static_cast<double>(attr_affected);
    }
    return out;
}

}  // namespace driftmon
