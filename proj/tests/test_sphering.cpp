#include "aeb/error.hpp"
#include "aeb/random.hpp"
#include "aeb/sphering.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace aeb;

TEST(Sigma, TwoPointSymmetric)
{
    const std::vector<std::vector<double>> data = {{1, 3}};
    EXPECT_DOUBLE_EQ(estimate_sigma(data).sigma(), 1.0);
}

TEST(Sigma, PooledAcrossVectors)
{
    const std::vector<std::vector<double>> data = {{0, 0, 0}, {2, 4, 6}};
    EXPECT_NEAR(estimate_sigma(data).sigma(), std::sqrt(8.0 / 6.0), 1e-15);
}

TEST(Sigma, DataVectorOverload)
{
    std::vector<DataVector> data(2);
    data[0].entries = {0, 0, 0};
    data[1].entries = {2, 4, 6};
    EXPECT_NEAR(estimate_sigma(data).sigma(), std::sqrt(8.0 / 6.0), 1e-15);
}

TEST(Sigma, Degenerate)
{
    const std::vector<std::vector<double>> flat = {{3, 3}, {7, 7, 7}};
    EXPECT_THROW(estimate_sigma(flat), DegenerateDataError);
    EXPECT_THROW(estimate_sigma(std::vector<std::vector<double>>{}), ArgumentError);
}

TEST(Sigma, ScaleValidation)
{
    EXPECT_THROW((void)SpheringScale(0.0), DomainError);
    EXPECT_THROW((void)SpheringScale(-1.0), DomainError);
    EXPECT_THROW((void)SpheringScale(std::numeric_limits<double>::infinity()), DomainError);
}

TEST(Normalize, CenterAndEdges)
{
    const SpheringScale s(1.0);
    // mean 0; entries at 0, +3, -3, +30 sigma
    const std::vector<double> p = {0.0, 3.0, -3.0, 30.0, -30.0};
    const auto x = normalize(p, s);
    EXPECT_DOUBLE_EQ(x[0], 0.5);
    EXPECT_DOUBLE_EQ(x[1], 0.9);
    EXPECT_DOUBLE_EQ(x[2], 0.1);
    EXPECT_DOUBLE_EQ(x[3], 0.9);
    EXPECT_DOUBLE_EQ(x[4], 0.1);
}

TEST(Normalize, RejectsNonFinite)
{
    const std::vector<double> p = {1.0, std::nan("")};
    EXPECT_THROW(normalize(p, SpheringScale(1.0)), DomainError);
}

TEST(Denormalize, Examples)
{
    const SpheringScale s(1.0);
    const std::vector<double> x = {0.5, 0.9};
    const auto p = denormalize(x, 0.0, s);
    EXPECT_DOUBLE_EQ(p[0], 0.0);
    EXPECT_NEAR(p[1], 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(denormalize(std::vector<double>{0.5}, 7.25, s)[0], 7.25);
}

TEST(Sphering, RangeMonotoneAndRoundTrip)
{
    Rng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const double sigma = uniform(rng, 0.01, 50.0);
        const SpheringScale s(sigma);
        std::vector<double> p(13);
        for (auto& v : p) {
            v = uniform(rng, -1000, 1000) * (trial % 2 ? 1.0 : 1e-3);
        }
        const auto x = normalize(p, s);
        const double m = mean(p);
        const auto back = denormalize(x, m, s);
        for (std::size_t i = 0; i < p.size(); ++i) {
            EXPECT_GE(x[i], 0.1);
            EXPECT_LE(x[i], 0.9);
            for (std::size_t j = 0; j < p.size(); ++j) {
                if (p[i] <= p[j]) {
                    EXPECT_LE(x[i], x[j]);
                }
            }
            if (std::abs(p[i] - m) <= 3 * sigma) {
                EXPECT_NEAR(back[i], p[i], 1e-9 * std::max(1.0, std::abs(p[i])));
            }
        }
    }
}

TEST(Denormalize, Affine)
{
    Rng rng(5);
    const SpheringScale s(2.5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x1(6), x2(6), mix(6);
        const double a = uniform01(rng);
        for (std::size_t i = 0; i < 6; ++i) {
            x1[i] = uniform01(rng);
            x2[i] = uniform01(rng);
            mix[i] = a * x1[i] + (1 - a) * x2[i];
        }
        const auto d1 = denormalize(x1, 3.0, s);
        const auto d2 = denormalize(x2, 3.0, s);
        const auto dm = denormalize(mix, 3.0, s);
        for (std::size_t i = 0; i < 6; ++i) {
            EXPECT_NEAR(dm[i], a * d1[i] + (1 - a) * d2[i], 1e-12);
        }
    }
}
