#include <gtest/gtest.h>

#include <cmath>

#include "driftmon/stats.hpp"

namespace {

using driftmon::fisher_f_sf;
using driftmon::regularized_incomplete_beta;
using driftmon::sigmoid;
using driftmon::softmax_inplace;

TEST(Sigmoid, KnownValues) {
    EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
    EXPECT_NEAR(sigmoid(2.0), 0.8807970779778823, 1e-15);
    EXPECT_NEAR(sigmoid(-2.0), 1.0 - sigmoid(2.0), 1e-15);
    EXPECT_NEAR(sigmoid(50.0), 1.0, 1e-15);
    EXPECT_GT(sigmoid(-745.0), 0.0);  // no underflow to exactly representable garbage
}

TEST(Softmax, UniformAndShiftInvariance) {
    std::vector<double> logits{0.0, 0.0, 0.0, 0.0};
    softmax_inplace(logits);
    for (double v : logits) EXPECT_NEAR(v, 0.25, 1e-15);

    std::vector<double> a{0.3, -1.2, 2.0};
    std::vector<double> b{0.3 + 7.0, -1.2 + 7.0, 2.0 + 7.0};
    softmax_inplace(a);
    softmax_inplace(b);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
}

TEST(Softmax, HandComputedPair) {
    // exp(ln 2) : exp(0) = 2 : 1
    std::vector<double> logits{std::log(2.0), 0.0};
    softmax_inplace(logits);
    EXPECT_NEAR(logits[0], 2.0 / 3.0, 1e-14);
    EXPECT_NEAR(logits[1], 1.0 / 3.0, 1e-14);
}

TEST(Softmax, SumsToOneAtLargeMagnitudes) {
    std::vector<double> logits{700.0, -700.0, 350.0, 0.0};
    softmax_inplace(logits);
    double sum = 0.0;
    for (double v : logits) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

// Reference values for the incomplete beta and the F survival function were
// computed once with an independent implementation and frozen here.
TEST(IncompleteBeta, ReferenceValues) {
    EXPECT_NEAR(regularized_incomplete_beta(0.5, 0.5, 0.3), 0.369010119565545, 1e-12);
    EXPECT_NEAR(regularized_incomplete_beta(2.0, 3.0, 0.4), 0.5248, 1e-12);
    EXPECT_NEAR(regularized_incomplete_beta(5.0, 1.0, 0.9), 0.59049, 1e-12);
    EXPECT_NEAR(regularized_incomplete_beta(1.5, 2.5, 0.62), 0.845447583511212, 1e-12);
    EXPECT_DOUBLE_EQ(regularized_incomplete_beta(2.0, 2.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(regularized_incomplete_beta(2.0, 2.0, 1.0), 1.0);
}

TEST(FisherFSurvival, ReferenceValues) {
    EXPECT_NEAR(fisher_f_sf(1.0, 1, 3), 0.391002218955771, 1e-12);
    EXPECT_NEAR(fisher_f_sf(5.32, 2, 10), 0.0266963283477756, 1e-12);
    EXPECT_NEAR(fisher_f_sf(0.5, 1, 3), 0.530477770932957, 1e-12);
    EXPECT_NEAR(fisher_f_sf(10.0, 1, 6), 0.0195086356411519, 1e-12);
    EXPECT_NEAR(fisher_f_sf(3.2, 2, 4), 0.14792899408284, 1e-12);
    EXPECT_NEAR(fisher_f_sf(0.05, 1, 3), 0.837424897288917, 1e-12);
    EXPECT_NEAR(fisher_f_sf(2.7, 3, 12), 0.0925427938436869, 1e-12);
}

TEST(FisherFSurvival, Edges) {
    EXPECT_DOUBLE_EQ(fisher_f_sf(0.0, 1, 3), 1.0);
    EXPECT_DOUBLE_EQ(fisher_f_sf(-1.0, 1, 3), 1.0);
    EXPECT_DOUBLE_EQ(fisher_f_sf(std::numeric_limits<double>::infinity(), 1, 3), 0.0);
    // Monotone decreasing in f.
    double prev = 1.0;
    for (double f = 0.1; f < 50.0; f *= 1.7) {
        const double p = fisher_f_sf(f, 2, 8);
        EXPECT_LT(p, prev);
        prev = p;
    }
}

}  // namespace
