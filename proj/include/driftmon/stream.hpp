#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "driftmon/errors.hpp"

namespace driftmon {

// One labeled observation. Features are expected to be normalized to [0,1]
// before reaching the learners; `seq` is the 1-based position in the stream.
struct Instance {
    std::vector<double> features;
    int label = 0;
    long seq = 0;
};

// A consecutive block of instances; `t` is the 1-based batch index.
struct MiniBatch {
    long t = 0;
    std::vector<Instance> instances;

    bool empty() const { return instances.empty(); }
    std::size_t size() const { return instances.size(); }
};

// Stream-wide shape plus the per-feature ranges used for normalization.
// Ranges are frozen from the first batch so the encoding stays stationary.
struct StreamSchema {
    int feature_count = 0;
    int class_count = 0;
    std::vector<std::pair<double, double>> feature_ranges;

    // Min/max per feature over a warm batch. Constant features get a range of
    // width 1 so they map to 0 instead of dividing by zero.
    static StreamSchema fit(const MiniBatch& warm, int class_count) {
        if (warm.empty()) throw SchemaError("cannot fit schema on an empty batch");
        const int d = static_cast<int>(warm.instances.front().features.size());
        StreamSchema schema;
        schema.feature_count = d;
        schema.class_count = class_count;
        schema.feature_ranges.assign(static_cast<std::size_t>(d),
                                     {std::numeric_limits<double>::infinity(),
                                      -std::numeric_limits<double>::infinity()});
        for (const Instance& inst : warm.instances) {
            if (static_cast<int>(inst.features.size()) != d) {
                throw SchemaError("inconsistent feature count within warm batch");
            }
            for (int i = 0; i < d; ++i) {
                auto& [lo, hi] = schema.feature_ranges[static_cast<std::size_t>(i)];
                lo = std::min(lo, inst.features[static_cast<std::size_t>(i)]);
                hi = std::max(hi, inst.features[static_cast<std::size_t>(i)]);
            }
        }
        for (auto& [lo, hi] : schema.feature_ranges) {
            if (!(hi > lo)) hi = lo + 1.0;
        }
        return schema;
    }
};

// Affine map of each feature into [0,1], clamped at the range ends.
inline std::vector<double> normalize(std::span<const double> raw, const StreamSchema& schema) {
    if (static_cast<int>(raw.size()) != schema.feature_count) {
        throw SchemaError("feature count does not match schema");
    }
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto& [lo, hi] = schema.feature_ranges[i];
        out[i] = std::clamp((raw[i] - lo) / (hi - lo), 0.0, 1.0);
    }
    return out;
}

inline std::vector<double> one_hot(int label, int class_count) {
    if (label < 0 || label >= class_count) {
        throw std::domain_error("label outside [0, class_count)");
    }
    std::vector<double> v(static_cast<std::size_t>(class_count), 0.0);
    v[static_cast<std::size_t>(label)] = 1.0;
    return v;
}

// Per-class counters: exact counts plus exponentially decayed counts that
// track the current imbalance as class frequencies move.
class ClassStats {
public:
    ClassStats(int class_count, double decay)
        : decay_(decay),
          counts_(static_cast<std::size_t>(class_count), 0),
          decayed_(static_cast<std::size_t>(class_count), 0.0) {}

    void update(int label) {
        if (label < 0 || label >= class_count()) {
            throw std::domain_error("label outside [0, class_count)");
        }
        ++counts_[static_cast<std::size_t>(label)];
        for (double& v : decayed_) v *= decay_;
        decayed_[static_cast<std::size_t>(label)] += 1.0;
        ++total_;
    }

    int class_count() const { return static_cast<int>(counts_.size()); }
    long total() const { return total_; }
    const std::vector<long>& counts() const { return counts_; }
    const std::vector<double>& decayed_counts() const { return decayed_; }
    double decay() const { return decay_; }

    // Largest class count over smallest positive class count.
    double imbalance_ratio() const {
        long mx = 0;
        long mn = 0;
        for (long c : counts_) {
            mx = std::max(mx, c);
            if (c > 0 && (mn == 0 || c < mn)) mn = c;
        }
        return mn > 0 ? static_cast<double>(mx) / static_cast<double>(mn) : 0.0;
    }

    // Decayed class frequencies, normalized; uniform before any update.
    std::vector<double> decayed_priors() const {
        std::vector<double> p(decayed_.begin(), decayed_.end());
        double sum = 0.0;
        for (double v : p) sum += v;
        if (sum <= 0.0) {
            std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
            return p;
        }
        for (double& v : p) v /= sum;
        return p;
    }

private:
    double decay_;
    std::vector<long> counts_;
    std::vector<double> decayed_;
    long total_ = 0;
};

}  // namespace driftmon
