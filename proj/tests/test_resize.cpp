// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "tsfp/gradcheck.hpp"
#include "tsfp/ops.hpp"
#include "tsfp/resize.hpp"
#include "tsfp/testing/oracles.hpp"

namespace {

using tsfp::Shape;
using tsfp::Tensor;
using tsfp::testing::random_tensor;
using DT = Tensor<double>;

TEST(Trilinear, ConstantsArePreservedExactly) {
    DT x = DT::filled({2, 2, 3, 3}, 5.0);
    auto y = tsfp::resize_trilinear(x, 4, 6, 6);
    ASSERT_EQ(y.shape(), (Shape{2, 4, 6, 6}));
    for (double v : y.data()) EXPECT_DOUBLE_EQ(v, 5.0);
}

TEST(Trilinear, OneDimensionalUpsampleMatchesClosedForm) {
    DT x = DT::from({1, 1, 1, 2}, {0.0, 1.0});
    auto y = tsfp::resize_trilinear(x, 1, 1, 4);
    ASSERT_EQ(y.shape(), (Shape{1, 1, 1, 4}));
    EXPECT_NEAR(y.data()[0], 0.125, 1e-12);
    EXPECT_NEAR(y.data()[1], 0.375, 1e-12);
    EXPECT_NEAR(y.data()[2], 0.625, 1e-12);
    EXPECT_NEAR(y.data()[3], 0.875, 1e-12);
}

TEST(Trilinear, RandomUpsampleMatchesScalarOracle) {
    tsfp::Rng rng(1);
    DT x = random_tensor<double>({1, 2, 2, 2}, rng);
    auto y = tsfp::resize_trilinear(x, 4, 4, 4);
    auto want = tsfp::testing::naive_resize3d<double>(x.data(), 1, 2, 2, 2, 4, 4, 4);
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(y.data()[i], want[i], 1e-6);
}

TEST(Trilinear, DownsampleMatchesScalarOracle) {
    tsfp::Rng rng(2);
    DT x = random_tensor<double>({2, 8, 4, 6}, rng);
    auto y = tsfp::resize_trilinear(x, 2, 4, 3);
    auto want = tsfp::testing::naive_resize3d<double>(x.data(), 2, 8, 4, 6, 2, 4, 3);
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(y.data()[i], want[i], 1e-9);
}

TEST(Trilinear, UpsampleThenAverageReturnsConstantExactly) {
    DT x = DT::filled({1, 2, 2, 2}, 0.37);
    auto up = tsfp::resize_trilinear(x, 4, 4, 4);
    // Average disjoint 2x2x2 blocks back down.
    for (int t = 0; t < 2; ++t)
        for (int h = 0; h < 2; ++h)
            for (int w = 0; w < 2; ++w) {
                double acc = 0.0;
                for (int dt = 0; dt < 2; ++dt)
                    for (int dh = 0; dh < 2; ++dh)
                        for (int dw = 0; dw < 2; ++dw)
                            acc += up.data()[((2 * t + dt) * 4 + 2 * h + dh) * 4 + 2 * w + dw];
                EXPECT_DOUBLE_EQ(acc / 8.0, 0.37);
            }
}

TEST(Bilinear, ConstantMapStaysConstant) {
    DT x = DT::filled({1, 1, 2, 2}, 0.25);
    auto y = tsfp::resize_bilinear(x, 8, 8);
    ASSERT_EQ(y.shape(), (Shape{1, 1, 8, 8}));
    for (double v : y.data()) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Bilinear, CheckerboardMatchesScalarOracle) {
    DT x = DT::from({1, 1, 2, 2}, {0.0, 1.0, 1.0, 0.0});
    auto y = tsfp::resize_bilinear(x, 4, 4);
    auto want = tsfp::testing::naive_resize3d<double>(x.data(), 1, 1, 2, 2, 1, 4, 4);
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(y.data()[i], want[i], 1e-9);
}

TEST(Bilinear, IdentityTargetIsBitIdentical) {
    tsfp::Rng rng(3);
    DT x = random_tensor<double>({3, 1, 5, 7}, rng);
    auto y = tsfp::resize_bilinear(x, 5, 7);
    for (std::int64_t i = 0; i < x.size(); ++i) EXPECT_EQ(y.data()[i], x.data()[i]);
}

TEST(Bilinear, RejectsUncollapsedTimeAxis) {
    try {
        tsfp::resize_bilinear(DT::zeros({1, 2, 4, 4}), 8, 8);
        FAIL() << "expected ShapeError";
    } catch (const tsfp::ShapeError& e) {
        EXPECT_EQ(e.axis(), "time");
    }
}

TEST(Resize, GradientCheckUpAndDown) {
    tsfp::Rng rng(4);
    const double up_err = tsfp::gradient_check<double>(
        [](const std::vector<DT>& in) {
            return tsfp::ops::sum(tsfp::resize_trilinear(in[0], 4, 5, 3));
        },
        {random_tensor<double>({2, 2, 3, 2}, rng)});
    EXPECT_LT(up_err, 1e-4);
    const double down_err = tsfp::gradient_check<double>(
        [](const std::vector<DT>& in) {
            return tsfp::ops::sum(tsfp::resize_trilinear(in[0], 2, 2, 2));
        },
        {random_tensor<double>({2, 4, 5, 4}, rng)});
    EXPECT_LT(down_err, 1e-4);
}

TEST(Resize, WeightedSumGradientCheck) {
    // Nonuniform downstream weights exercise every interpolation tap.
    tsfp::Rng rng(5);
    DT weights = random_tensor<double>({1, 3, 4, 4}, rng);
    const double err = tsfp::gradient_check<double>(
        [weights](const std::vector<DT>& in) {
            return tsfp::ops::sum(tsfp::ops::mul(tsfp::resize_trilinear(in[0], 3, 4, 4), weights));
        },
        {random_tensor<double>({1, 2, 2, 3}, rng)});
    EXPECT_LT(err, 1e-4);
}

}  // namespace
