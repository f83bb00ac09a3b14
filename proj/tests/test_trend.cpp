#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <random>

#include "driftmon/rng.hpp"
#include "driftmon/trend.hpp"

namespace {

using driftmon::Rng;
using driftmon::TrendTracker;
using driftmon::WindowConfig;

struct BruteForce {
    double sum_tr = 0.0, sum_t = 0.0, sum_r = 0.0, sum_t2 = 0.0;

    static BruteForce over(const std::deque<std::pair<long, double>>& ring) {
        BruteForce b;
        for (const auto& [t, r] : ring) {
            const double td = static_cast<double>(t);
            b.sum_tr += td * r;
            b.sum_t += td;
            b.sum_r += r;
            b.sum_t2 += td * td;
        }
        return b;
    }

    double slope(std::size_t n) const {
        const double nn = static_cast<double>(n);
        return (nn * sum_tr - sum_t * sum_r) / (nn * sum_t2 - sum_t * sum_t);
    }
};

TEST(TrendTracker, HandComputedSums) {
    TrendTracker tracker(1, {.min_window = 8, .max_window = 200});
    tracker.update(0, 1, 1.0);
    tracker.update(0, 2, 2.0);
    tracker.update(0, 3, 3.0);
    const auto brute = BruteForce::over(tracker.history(0));
    EXPECT_DOUBLE_EQ(brute.sum_tr, 14.0);
    EXPECT_DOUBLE_EQ(brute.sum_t, 6.0);
    EXPECT_DOUBLE_EQ(brute.sum_r, 6.0);
    EXPECT_DOUBLE_EQ(brute.sum_t2, 14.0);
    ASSERT_TRUE(tracker.slope(0).has_value());
    EXPECT_DOUBLE_EQ(*tracker.slope(0), 1.0);  // (3*14 - 6*6) / (3*14 - 36)
}

TEST(TrendTracker, ConstantSeriesHasZeroSlope) {
    TrendTracker tracker(1);
    tracker.update(0, 1, 5.0);
    tracker.update(0, 2, 5.0);
    tracker.update(0, 3, 5.0);
    EXPECT_DOUBLE_EQ(*tracker.slope(0), 0.0);
}

TEST(TrendTracker, SlopeInvariantToLevelShift) {
    TrendTracker a(1), b(1);
    Rng rng(3);
    for (long t = 1; t <= 40; ++t) {
        const double r = rng.uniform();
        a.update(0, t, r);
        b.update(0, t, r + 123.5);
    }
    EXPECT_NEAR(*a.slope(0), *b.slope(0), 1e-9);
}

TEST(TrendTracker, RecoversExactLinearTrend) {
    TrendTracker tracker(1, {.min_window = 8, .max_window = 50});
    const double slope = -0.37;
    const double intercept = 11.0;
    for (long t = 1; t <= 120; ++t) {
        tracker.update(0, t, slope * static_cast<double>(t) + intercept);
        if (tracker.effective_count(0) >= 2) {
            EXPECT_NEAR(*tracker.slope(0), slope, 1e-9);
        }
    }
}

TEST(TrendTracker, InsufficientDataSignals) {
    TrendTracker tracker(2);
    EXPECT_FALSE(tracker.slope(0).has_value());
    tracker.update(0, 1, 1.0);
    EXPECT_FALSE(tracker.slope(0).has_value());
    tracker.update(0, 2, 2.0);
    EXPECT_TRUE(tracker.slope(0).has_value());
    EXPECT_FALSE(tracker.slope(1).has_value());
}

TEST(TrendTracker, NonMonotoneTimeIsSequencingError) {
    TrendTracker tracker(1);
    tracker.update(0, 5, 1.0);
    EXPECT_THROW(tracker.update(0, 5, 1.0), driftmon::SequencingError);
    EXPECT_THROW(tracker.update(0, 4, 1.0), driftmon::SequencingError);
}

// Running sums with evictions stay within 1e-9 relative of brute-force
// recomputation over many random sequences.
TEST(TrendTracker, RunningSumsMatchBruteForceUnderEviction) {
    Rng rng(12345);
    for (int trial = 0; trial < 300; ++trial) {
        WindowConfig cfg;
        cfg.min_window = 4;
        cfg.max_window = 4 + static_cast<int>(rng.uniform() * 30);
        TrendTracker tracker(1, cfg);
        long t = 0;
        const int updates = 50 + static_cast<int>(rng.uniform() * 100);
        for (int i = 0; i < updates; ++i) {
            t += 1 + static_cast<long>(rng.uniform() * 3);
            tracker.update(0, t, rng.uniform() * 5.0);
            if (rng.uniform() < 0.3) tracker.adapt(0);
            const auto brute = BruteForce::over(tracker.history(0));
            if (tracker.effective_count(0) >= 2) {
                const double got = *tracker.slope(0);
                const double want = brute.slope(tracker.history(0).size());
                EXPECT_NEAR(got, want, 1e-9 * std::max(1.0, std::fabs(want)));
            }
        }
    }
}

TEST(AdaptiveWindow, GrowsOnStationaryData) {
    TrendTracker tracker(1, {.min_window = 8, .max_window = 64, .delta = 0.002});
    Rng rng(5);
    for (long t = 1; t <= 100; ++t) {
        tracker.update(0, t, 1.0 + 0.1 * rng.gaussian());
        tracker.adapt(0);
    }
    EXPECT_EQ(tracker.window(0), 64);  // grew to the cap, no cuts
}

// Shrinks rarely on stationary i.i.d. data: the cut is calibrated so spurious
// drops happen with probability at most about delta per comparison.
TEST(AdaptiveWindow, RareShrinkOnStationarySeries) {
    int shrinks = 0;
    constexpr int kRuns = 300;
    for (int run = 0; run < kRuns; ++run) {
        TrendTracker tracker(1, {.min_window = 8, .max_window = 200, .delta = 0.002});
        Rng rng(1000 + static_cast<std::uint64_t>(run));
        bool shrank = false;
        for (long t = 1; t <= 100; ++t) {
            tracker.update(0, t, 1.0 + 0.1 * rng.gaussian());
            const int before = tracker.window(0);
            tracker.adapt(0);
            if (tracker.window(0) < before) shrank = true;
        }
        if (shrank) ++shrinks;
    }
    // delta * comparisons = 0.002 * 100 = 0.2 expected shrink probability cap.
    EXPECT_LE(static_cast<double>(shrinks) / kRuns, 0.2);
}

TEST(AdaptiveWindow, DropsOldWindowAfterStepChange) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        TrendTracker tracker(1, {.min_window = 8, .max_window = 200, .delta = 0.002});
        Rng rng(seed);
        long t = 0;
        for (int i = 0; i < 60; ++i) {
            tracker.update(0, ++t, 1.0 + 0.1 * rng.gaussian());
            tracker.adapt(0);
        }
        // Step of ten standard deviations.
        int detected_after = -1;
        for (int i = 0; i < 10; ++i) {
            tracker.update(0, ++t, 2.0 + 0.1 * rng.gaussian());
            const int before = tracker.window(0);
            tracker.adapt(0);
            if (tracker.window(0) < before) {
                detected_after = i + 1;
                break;
            }
        }
        ASSERT_NE(detected_after, -1) << "seed " << seed;
        EXPECT_LE(detected_after, 5) << "seed " << seed;
        // Retained history holds only post-change values.
        for (const auto& [tt, r] : tracker.history(0)) EXPECT_GT(r, 1.5);
    }
}

TEST(AdaptiveWindow, EqualMeansNeverCut) {
    TrendTracker tracker(1, {.min_window = 4, .max_window = 32});
    for (long t = 1; t <= 20; ++t) {
        tracker.update(0, t, 3.0);
        const int before = tracker.window(0);
        tracker.adapt(0);
        EXPECT_GE(tracker.window(0), before);
    }
}

TEST(TrendTracker, ResetClearsOnlyThatClass) {
    TrendTracker tracker(2);
    for (long t = 1; t <= 10; ++t) {
        tracker.update(0, t, 1.0);
        tracker.update(1, t, 2.0);
    }
    tracker.reset(0);
    EXPECT_EQ(tracker.effective_count(0), 0);
    EXPECT_EQ(tracker.effective_count(1), 10);
    // After a reset the class accepts earlier batch indices again.
    tracker.update(0, 3, 1.0);
    EXPECT_EQ(tracker.effective_count(0), 1);
}

}  // namespace
