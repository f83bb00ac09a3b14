#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "driftmon/csv.hpp"
#include "driftmon/stream.hpp"

namespace {

using driftmon::ClassStats;
using driftmon::Instance;
using driftmon::MiniBatch;
using driftmon::normalize;
using driftmon::one_hot;
using driftmon::StreamSchema;

StreamSchema schema_with_ranges(std::vector<std::pair<double, double>> ranges, int classes = 2) {
    StreamSchema s;
    s.feature_count = static_cast<int>(ranges.size());
    s.class_count = classes;
    s.feature_ranges = std::move(ranges);
    return s;
}

TEST(Normalize, MidpointAndEndpoints) {
    const auto schema1 = schema_with_ranges({{0.0, 10.0}});
    EXPECT_DOUBLE_EQ(normalize(std::vector<double>{5.0}, schema1)[0], 0.5);

    const auto schema2 = schema_with_ranges({{0.0, 10.0}, {0.0, 10.0}});
    const auto out = normalize(std::vector<double>{0.0, 10.0}, schema2);
    EXPECT_DOUBLE_EQ(out[0], 0.0);
    EXPECT_DOUBLE_EQ(out[1], 1.0);
}

TEST(Normalize, ClampsBelowRange) {
    const auto schema = schema_with_ranges({{0.0, 10.0}});
    EXPECT_DOUBLE_EQ(normalize(std::vector<double>{-3.0}, schema)[0], 0.0);
}

TEST(Normalize, LengthMismatchIsSchemaError) {
    const auto schema = schema_with_ranges({{0.0, 1.0}});
    EXPECT_THROW(normalize(std::vector<double>{0.1, 0.2}, schema), driftmon::SchemaError);
}

TEST(Normalize, IdempotentOnUnitRanges) {
    const auto unit = schema_with_ranges({{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x{u(rng), u(rng), u(rng)};
        const auto once = normalize(x, unit);
        const auto twice = normalize(once, unit);
        EXPECT_EQ(once, twice);
    }
}

TEST(SchemaFit, ConstantFeatureGetsUnitWidth) {
    MiniBatch batch;
    batch.t = 1;
    batch.instances.push_back({{2.0, 7.0}, 0, 1});
    batch.instances.push_back({{2.0, 9.0}, 1, 2});
    const auto schema = StreamSchema::fit(batch, 2);
    EXPECT_DOUBLE_EQ(schema.feature_ranges[0].first, 2.0);
    EXPECT_DOUBLE_EQ(schema.feature_ranges[0].second, 3.0);
    // Constant features map to 0.
    EXPECT_DOUBLE_EQ(normalize(std::vector<double>{2.0, 8.0}, schema)[0], 0.0);
}

TEST(OneHot, Basics) {
    EXPECT_EQ(one_hot(0, 3), (std::vector<double>{1, 0, 0}));
    EXPECT_EQ(one_hot(2, 3), (std::vector<double>{0, 0, 1}));
    EXPECT_EQ(one_hot(1, 2), (std::vector<double>{0, 1}));
    EXPECT_THROW(one_hot(3, 3), std::domain_error);
}

TEST(ClassStats, CountAndDecay) {
    ClassStats s(2, 1.0);
    s.update(0);
    EXPECT_EQ(s.counts()[0], 1);
    EXPECT_EQ(s.counts()[1], 0);
    EXPECT_DOUBLE_EQ(s.decayed_counts()[0], 1.0);
    s.update(0);
    EXPECT_EQ(s.counts()[0], 2);
    EXPECT_DOUBLE_EQ(s.decayed_counts()[0], 2.0);

    // Decay rule: every decayed count is scaled by theta, then the observed
    // label gains one. Hand-evaluated sequence at theta = 0.5:
    ClassStats f(2, 0.5);
    f.update(0);  // (1, 0)
    f.update(0);  // (1.5, 0)
    f.update(1);  // (0.75, 1)
    EXPECT_DOUBLE_EQ(f.decayed_counts()[0], 0.75);
    EXPECT_DOUBLE_EQ(f.decayed_counts()[1], 1.0);
}

TEST(ClassStats, PermutationInvariantWithoutDecay) {
    std::vector<int> labels{0, 1, 1, 2, 0, 2, 2, 1, 0, 0};
    ClassStats a(3, 1.0);
    for (int y : labels) a.update(y);
    std::mt19937_64 rng(3);
    std::shuffle(labels.begin(), labels.end(), rng);
    ClassStats b(3, 1.0);
    for (int y : labels) b.update(y);
    EXPECT_EQ(a.counts(), b.counts());
    for (int m = 0; m < 3; ++m) {
        EXPECT_DOUBLE_EQ(a.decayed_counts()[static_cast<std::size_t>(m)],
                         b.decayed_counts()[static_cast<std::size_t>(m)]);
    }
}

TEST(ClassStats, ReplayMatchesIncrementalCounts) {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> pick(0, 4);
    std::vector<int> labels;
    ClassStats inc(5, 0.99);
    for (int i = 0; i < 5000; ++i) {
        const int y = pick(rng);
        labels.push_back(y);
        inc.update(y);
    }
    std::vector<long> replay(5, 0);
    for (int y : labels) ++replay[static_cast<std::size_t>(y)];
    EXPECT_EQ(inc.counts(), replay);
    EXPECT_NEAR(inc.imbalance_ratio(),
                static_cast<double>(*std::max_element(replay.begin(), replay.end())) /
                    static_cast<double>(*std::min_element(replay.begin(), replay.end())),
                1e-12);
}

TEST(Csv, RoundTripAndErrors) {
    std::vector<Instance> instances;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        Instance inst;
        inst.features = {u(rng), u(rng), u(rng)};
        inst.label = i % 4;
        inst.seq = i + 1;
        instances.push_back(inst);
    }
    std::stringstream ss;
    driftmon::write_stream_csv(ss, instances);
    const auto parsed = driftmon::read_stream_csv(ss);
    ASSERT_EQ(parsed.size(), instances.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        EXPECT_EQ(parsed[i].features, instances[i].features);
        EXPECT_EQ(parsed[i].label, instances[i].label);
        EXPECT_EQ(parsed[i].seq, static_cast<long>(i + 1));
    }

    std::stringstream bad("1.0;2.0;0\n");
    EXPECT_THROW(driftmon::read_stream_csv(bad), driftmon::SchemaError);

    std::stringstream semi("1.0;2.0;0\n");
    const auto semi_rows = driftmon::read_stream_csv(semi, {';', false});
    ASSERT_EQ(semi_rows.size(), 1u);
    EXPECT_EQ(semi_rows[0].label, 0);

    std::stringstream with_header("f0,f1,label\n0.5,0.25,1\n");
    const auto rows = driftmon::read_stream_csv(with_header, {',', true});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].label, 1);
}

}  // namespace
