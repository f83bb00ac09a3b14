#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "driftmon/rbm.hpp"
#include "driftmon/rbm_io.hpp"
#include "driftmon/rng.hpp"

namespace {

using driftmon::class_activation;
using driftmon::class_balance_weight;
using driftmon::ClassBalanceState;
using driftmon::energy;
using driftmon::GradientEstimate;
using driftmon::hidden_activation;
using driftmon::RbmHyperparams;
using driftmon::RbmParameters;
using driftmon::Rng;
using driftmon::visible_activation;

RbmParameters tiny_111() {
    RbmParameters p = RbmParameters::zeros(1, 1, 1);
    p.a = {0.1};
    p.b = {0.2};
    p.c = {0.3};
    p.w = {0.5};
    p.u = {0.7};
    return p;
}

TEST(Energy, ZeroStateIsZero) {
    RbmParameters p = tiny_111();
    const std::vector<double> zero{0.0};
    EXPECT_DOUBLE_EQ(energy(zero, zero, zero, p), 0.0);
}

TEST(Energy, HandComputedSum) {
    RbmParameters p = tiny_111();
    const std::vector<double> one{1.0};
    EXPECT_NEAR(energy(one, one, one, p), -1.8, 1e-15);
}

TEST(Energy, LinearInParameters) {
    RbmParameters p = tiny_111();
    const std::vector<double> one{1.0};
    const double e1 = energy(one, one, one, p);
    for (double* x : {&p.a[0], &p.b[0], &p.c[0], &p.w[0], &p.u[0]}) *x *= 2.0;
    EXPECT_NEAR(energy(one, one, one, p), 2.0 * e1, 1e-15);
}

TEST(Energy, DimensionMismatch) {
    RbmParameters p = tiny_111();
    const std::vector<double> two{1.0, 0.0};
    const std::vector<double> one{1.0};
    EXPECT_THROW(energy(two, one, one, p), std::domain_error);
}

TEST(HiddenActivation, ZeroParametersGiveHalf) {
    RbmParameters p = RbmParameters::zeros(3, 4, 2);
    const auto h = hidden_activation(std::vector<double>{0.2, 0.9, 0.4},
                                     std::vector<double>{1.0, 0.0}, p);
    for (double v : h) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(HiddenActivation, SaturatesAtLargeBias) {
    RbmParameters p = RbmParameters::zeros(1, 1, 1);
    p.b = {50.0};
    const auto h = hidden_activation(std::vector<double>{0.0}, std::vector<double>{0.0}, p);
    EXPECT_NEAR(h[0], 1.0, 1e-15);
}

TEST(HiddenActivation, HandComputedLogistic) {
    RbmParameters p = RbmParameters::zeros(1, 1, 1);
    p.w = {1.0};
    p.u = {1.0};
    const auto h = hidden_activation(std::vector<double>{1.0}, std::vector<double>{1.0}, p);
    EXPECT_NEAR(h[0], 0.8807970779778823, 1e-12);
}

TEST(VisibleActivation, IgnoresClassParameters) {
    Rng rng(2);
    RbmParameters p = RbmParameters::zeros(2, 3, 4);
    for (double& x : p.w) x = rng.gaussian();
    for (double& x : p.a) x = rng.gaussian();
    const std::vector<double> h{0.3, 0.8, 0.1};
    const auto before = visible_activation(h, p);
    for (double& x : p.u) x = rng.gaussian();
    for (double& x : p.c) x = rng.gaussian();
    const auto after = visible_activation(h, p);
    EXPECT_EQ(before, after);
}

TEST(VisibleActivation, HandComputed) {
    RbmParameters p = RbmParameters::zeros(1, 1, 2);
    p.a = {-1.0};
    p.w = {1.0};
    const auto v = visible_activation(std::vector<double>{1.0}, p);
    EXPECT_DOUBLE_EQ(v[0], 0.5);
}

TEST(ClassActivation, UniformAtZeroParameters) {
    RbmParameters p = RbmParameters::zeros(2, 3, 4);
    const auto z = class_activation(std::vector<double>{0.0, 0.0, 0.0}, p);
    for (double v : z) EXPECT_NEAR(v, 0.25, 1e-15);
}

TEST(ClassActivation, SumsToOneUnderExtremePreactivations) {
    Rng rng(5);
    RbmParameters p = RbmParameters::zeros(1, 2, 5);
    for (double& x : p.c) x = rng.uniform(-700.0, 700.0);
    for (double& x : p.u) x = rng.uniform(-350.0, 350.0);
    const auto z = class_activation(std::vector<double>{1.0, 1.0}, p);
    double sum = 0.0;
    for (double v : z) {
        EXPECT_GE(v, 0.0);
        sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(ClassBalance, WeightFormula) {
    ClassBalanceState s;
    s.beta = 0.0;
    s.effective_counts = {5.0, 1.0};
    EXPECT_DOUBLE_EQ(class_balance_weight(0, s), 1.0);

    s.beta = 0.9;
    s.effective_counts = {1.0, 2.0};
    EXPECT_NEAR(class_balance_weight(0, s), 1.0, 1e-12);
    EXPECT_NEAR(class_balance_weight(1, s), 0.526315789473684, 1e-12);

    // Unseen classes keep weight 1 so a first occurrence is not suppressed.
    s.effective_counts = {0.0, 2.0};
    EXPECT_DOUBLE_EQ(class_balance_weight(0, s), 1.0);
}

TEST(ApplyUpdate, ZeroEtaAndZeroGradientAreNoOps) {
    Rng rng(3);
    driftmon::StreamSchema schema;
    schema.feature_count = 4;
    schema.class_count = 3;
    RbmHyperparams hp;
    RbmParameters p = driftmon::init_parameters(schema, hp, rng);
    const RbmParameters before = p;

    GradientEstimate g = GradientEstimate::zeros(p);
    driftmon::apply_update(p, g, 0.5);
    EXPECT_EQ(p.w, before.w);

    for (double& x : g.w) x = 0.25;
    driftmon::apply_update(p, g, 0.0);
    EXPECT_EQ(p.w, before.w);
}

TEST(ApplyUpdate, HandComputedStep) {
    RbmParameters p = RbmParameters::zeros(1, 1, 1);
    p.w = {0.5};
    GradientEstimate g = GradientEstimate::zeros(p);
    g.w = {0.1};
    driftmon::apply_update(p, g, 0.05);
    EXPECT_NEAR(p.w[0], 0.495, 1e-15);
}

TEST(ApplyUpdate, ReversibleInEta) {
    Rng rng(7);
    RbmParameters p = RbmParameters::zeros(2, 2, 2);
    for (double& x : p.w) x = rng.gaussian();
    GradientEstimate g = GradientEstimate::zeros(p);
    for (double& x : g.w) x = rng.gaussian();
    for (double& x : g.a) x = rng.gaussian();
    const RbmParameters before = p;
    driftmon::apply_update(p, g, 0.7);
    driftmon::apply_update(p, g, -0.7);
    EXPECT_EQ(p.w, before.w);
    EXPECT_EQ(p.a, before.a);
}

TEST(ApplyUpdate, RejectsNonFiniteGradient) {
    RbmParameters p = RbmParameters::zeros(1, 1, 1);
    p.w = {0.5};
    GradientEstimate g = GradientEstimate::zeros(p);
    g.w = {std::numeric_limits<double>::quiet_NaN()};
    EXPECT_THROW(driftmon::apply_update(p, g, 0.1), driftmon::TrainingError);
    EXPECT_DOUBLE_EQ(p.w[0], 0.5);
}

TEST(InitParameters, HiddenFractionAndDeterminism) {
    driftmon::StreamSchema schema;
    schema.feature_count = 20;
    schema.class_count = 5;
    RbmHyperparams hp;
    hp.hidden_fraction = 0.5;
    Rng rng_a(99);
    const RbmParameters a = driftmon::init_parameters(schema, hp, rng_a);
    EXPECT_EQ(a.hidden, 10);
    EXPECT_EQ(a.visible, 20);
    EXPECT_EQ(a.classes, 5);

    Rng rng_b(99);
    const RbmParameters b = driftmon::init_parameters(schema, hp, rng_b);
    EXPECT_EQ(a.w, b.w);
    EXPECT_EQ(a.u, b.u);

    for (double bias : a.a) EXPECT_DOUBLE_EQ(bias, 0.0);
    for (double bias : a.b) EXPECT_DOUBLE_EQ(bias, 0.0);
    for (double bias : a.c) EXPECT_DOUBLE_EQ(bias, 0.0);

    // Sample standard deviation of the weight init stays near 0.01.
    double sum = 0.0;
    double sum2 = 0.0;
    for (double x : a.w) {
        sum += x;
        sum2 += x * x;
    }
    const double n = static_cast<double>(a.w.size());
    const double sd = std::sqrt((sum2 - sum * sum / n) / (n - 1.0));
    EXPECT_GE(sd, 0.005);
    EXPECT_LE(sd, 0.02);
}

TEST(ParameterIo, BinaryRoundTripIsBitExact) {
    Rng rng(21);
    RbmParameters p = RbmParameters::zeros(5, 3, 4);
    for (double& x : p.w) x = rng.gaussian();
    for (double& x : p.u) x = rng.gaussian();
    for (double& x : p.a) x = rng.gaussian();
    for (double& x : p.b) x = rng.gaussian();
    for (double& x : p.c) x = rng.gaussian();
    p.w[0] = 0.1 + 0.2;  // a value with a non-terminating binary expansion

    std::stringstream ss;
    driftmon::save_parameters_binary(ss, p);
    const RbmParameters q = driftmon::load_parameters_binary(ss);
    EXPECT_EQ(p.visible, q.visible);
    EXPECT_EQ(p.hidden, q.hidden);
    EXPECT_EQ(p.classes, q.classes);
    EXPECT_EQ(p.w, q.w);
    EXPECT_EQ(p.u, q.u);
    EXPECT_EQ(p.a, q.a);
    EXPECT_EQ(p.b, q.b);
    EXPECT_EQ(p.c, q.c);
}

TEST(ParameterIo, JsonRoundTripAndBadInput) {
    RbmParameters p = RbmParameters::zeros(2, 2, 2);
    p.w = {0.25, -0.5, 0.75, 1.0};
    const auto j = driftmon::parameters_to_json(p);
    const RbmParameters q = driftmon::parameters_from_json(j);
    EXPECT_EQ(p.w, q.w);

    std::stringstream garbage("not a snapshot");
    EXPECT_THROW(driftmon::load_parameters_binary(garbage), driftmon::ConfigError);
}

}  // namespace
