#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "driftmon/errors.hpp"

namespace driftmon {

// Cost-sensitive multi-class perceptron. Mistakes move the true class's
// weights toward the input and the predicted class's away from it, scaled by
// the inverse prior of the true class so rare classes are not drowned out.
class LinearClassifier {
public:
    LinearClassifier(int feature_count, int class_count, double cost_cap = 100.0)
        : features_(feature_count),
          classes_(class_count),
          cost_cap_(cost_cap),
          weights_(static_cast<std::size_t>(class_count) * feature_count, 0.0),
          biases_(static_cast<std::size_t>(class_count), 0.0) {}

    // Linear responses per class; argmax prediction with ties broken toward
    // the smaller class id.
    std::pair<int, std::vector<double>> predict(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != features_) {
            throw std::domain_error("feature count does not match classifier");
        }
        std::vector<double> scores(static_cast<std::size_t>(classes_));
        int best = 0;
        for (int m = 0; m < classes_; ++m) {
            const double* row = &weights_[static_cast<std::size_t>(m) * features_];
            double s = biases_[static_cast<std::size_t>(m)];
            for (int i = 0; i < features_; ++i) s += row[i] * x[static_cast<std::size_t>(i)];
            scores[static_cast<std::size_t>(m)] = s;
            if (s > scores[static_cast<std::size_t>(best)]) best = m;
        }
        return {best, std::move(scores)};
    }

    // Perceptron step on a misprediction. `priors` are decayed class
    // frequencies; the update cost is the true class's inverse prior relative
    // to the largest prior, capped.
    void learn(std::span<const double> x, int label, std::span<const double> priors) {
        const auto [predicted, scores] = predict(x);
        if (predicted == label) return;
        const double cost = update_cost(label, priors);
        double* w_true = &weights_[static_cast<std::size_t>(label) * features_];
        double* w_pred = &weights_[static_cast<std::size_t>(predicted) * features_];
        for (int i = 0; i < features_; ++i) {
            w_true[i] += cost * x[static_cast<std::size_t>(i)];
            w_pred[i] -= cost * x[static_cast<std::size_t>(i)];
        }
        biases_[static_cast<std::size_t>(label)] += cost;
        biases_[static_cast<std::size_t>(predicted)] -= cost;
    }

    double update_cost(int label, std::span<const double> priors) const {
        double max_prior = 0.0;
        for (double p : priors) max_prior = std::max(max_prior, p);
        const double p = priors[static_cast<std::size_t>(label)];
        if (p <= 0.0 || max_prior <= 0.0) return 1.0;
        return std::min(cost_cap_, max_prior / p);
    }

    void reset_class(int m) {
        std::fill_n(weights_.begin() + static_cast<std::ptrdiff_t>(m) * features_, features_, 0.0);
        biases_[static_cast<std::size_t>(m)] = 0.0;
    }

    void reset_all() {
        std::fill(weights_.begin(), weights_.end(), 0.0);
        std::fill(biases_.begin(), biases_.end(), 0.0);
    }

    int feature_count() const { return features_; }
    int class_count() const { return classes_; }

private:
    int features_;
    int classes_;
    double cost_cap_;
    std::vector<double> weights_;
    std::vector<double> biases_;
};

}  // namespace driftmon
