// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>

#include "helpers.hpp"
#include "tsfp/checkpoint.hpp"
#include "tsfp/encoder.hpp"
#include "tsfp/ops.hpp"

namespace {

using tsfp::EncoderConfig;
using tsfp::S3dEncoder;
using tsfp::Shape;
using tsfp::Tensor;
using tsfp::testing::random_tensor;
using FT = Tensor<float>;

TEST(Encoder, PaperScaleLevelShapes) {
    S3dEncoder<float> enc(EncoderConfig{}, 1);
    const auto shapes = enc.level_shapes(32, 192, 352);
    EXPECT_EQ(shapes[0], (Shape{16, 32, 48, 88}));
    EXPECT_EQ(shapes[1], (Shape{32, 16, 24, 44}));
    EXPECT_EQ(shapes[2], (Shape{64, 8, 12, 22}));
    EXPECT_EQ(shapes[3], (Shape{96, 8, 6, 11}));
}

TEST(Encoder, ToyForwardMatchesStrideArithmetic) {
    S3dEncoder<float> enc(EncoderConfig{}, 2);
    const auto want = enc.level_shapes(8, 32, 64);
    EXPECT_EQ(want[0], (Shape{16, 8, 8, 16}));
    EXPECT_EQ(want[1], (Shape{32, 4, 4, 8}));
    EXPECT_EQ(want[2], (Shape{64, 2, 2, 4}));
    EXPECT_EQ(want[3], (Shape{96, 2, 1, 2}));

    tsfp::Rng rng(3);
    tsfp::autograd::NoGradGuard guard;
    const auto levels = enc.forward(random_tensor<float>({3, 8, 32, 64}, rng));
    for (int i = 0; i < 4; ++i) EXPECT_EQ(levels[i].shape(), want[i]);
    // Spatial dims shrink monotonically with depth.
    for (int i = 1; i < 4; ++i) {
        EXPECT_LE(levels[i].dim(2), levels[i - 1].dim(2));
        EXPECT_LE(levels[i].dim(3), levels[i - 1].dim(3));
    }
}

TEST(Encoder, DivisibilityErrorsNameTheAxis) {
    S3dEncoder<float> enc(EncoderConfig{}, 1);
    try {
        enc.check_input_dims({3, 30, 32, 64});
        FAIL() << "expected ShapeError";
    } catch (const tsfp::ShapeError& e) {
        EXPECT_EQ(e.axis(), "time");
    }
    try {
        enc.check_input_dims({3, 8, 100, 64});
        FAIL() << "expected ShapeError";
    } catch (const tsfp::ShapeError& e) {
        EXPECT_EQ(e.axis(), "height");
    }
}

TEST(Encoder, SameSeedGivesBitIdenticalWeightsAndOutputs) {
    S3dEncoder<float> a(EncoderConfig{}, 42);
    S3dEncoder<float> b(EncoderConfig{}, 42);
    tsfp::ParamMap<float> pa, pb;
    a.collect_params(pa);
    b.collect_params(pb);
    ASSERT_EQ(pa.items().size(), pb.items().size());
    for (std::size_t i = 0; i < pa.items().size(); ++i) {
        EXPECT_EQ(pa.items()[i].first, pb.items()[i].first);
        const auto& ta = pa.items()[i].second;
        const auto& tb = pb.items()[i].second;
        for (std::int64_t k = 0; k < ta.size(); ++k) EXPECT_EQ(ta.data()[k], tb.data()[k]);
    }

    tsfp::Rng rng(5);
    FT clip = random_tensor<float>({3, 8, 32, 64}, rng);
    tsfp::autograd::NoGradGuard guard;
    const auto la = a.forward(clip);
    const auto lb = b.forward(clip);
    for (int i = 0; i < 4; ++i)
        for (std::int64_t k = 0; k < la[i].size(); ++k)
            EXPECT_EQ(la[i].data()[k], lb[i].data()[k]);
}

TEST(Encoder, DifferentSeedsDiffer) {
    S3dEncoder<float> a(EncoderConfig{}, 1);
    S3dEncoder<float> b(EncoderConfig{}, 2);
    tsfp::ParamMap<float> pa, pb;
    a.collect_params(pa);
    b.collect_params(pb);
    bool any_diff = false;
    for (std::size_t i = 0; i < pa.items().size() && !any_diff; ++i) {
        const auto& ta = pa.items()[i].second;
        const auto& tb = pb.items()[i].second;
        for (std::int64_t k = 0; k < ta.size(); ++k)
            if (ta.data()[k] != tb.data()[k]) {
                any_diff = true;
                break;
            }
    }
    EXPECT_TRUE(any_diff);
}

TEST(Encoder, ZeroInputGivesZeroLevelsWithZeroBiases) {
    S3dEncoder<float> enc(EncoderConfig{}, 7);  // biases are zero-initialized
    tsfp::autograd::NoGradGuard guard;
    const auto levels = enc.forward(FT::zeros({3, 8, 32, 64}));
    for (const auto& level : levels)
        for (float v : level.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Encoder, CheckpointRoundTripPreservesForward) {
    namespace fs = std::filesystem;
    S3dEncoder<float> a(EncoderConfig{}, 11);
    tsfp::ParamMap<float> pa;
    a.collect_params(pa);
    const fs::path path = fs::temp_directory_path() / "tsfp_enc_test.ckpt";
    tsfp::save_checkpoint(path, pa);

    S3dEncoder<float> b(EncoderConfig{}, 999);
    tsfp::ParamMap<float> pb;
    b.collect_params(pb);
    tsfp::load_checkpoint(path, pb);

    tsfp::Rng rng(13);
    FT clip = random_tensor<float>({3, 8, 32, 64}, rng);
    tsfp::autograd::NoGradGuard guard;
    const auto la = a.forward(clip);
    const auto lb = b.forward(clip);
    for (int i = 0; i < 4; ++i)
        for (std::int64_t k = 0; k < la[i].size(); ++k)
            EXPECT_EQ(la[i].data()[k], lb[i].data()[k]);
}

TEST(Encoder, ReceptiveFieldGrowsStrictlyWithDepth) {
    S3dEncoder<float> enc(EncoderConfig{}, 1);
    auto prev = enc.receptive_field(0);
    for (int axis = 0; axis < 3; ++axis) EXPECT_GT(prev[axis], 1);
    for (int level = 1; level < 4; ++level) {
        const auto rf = enc.receptive_field(level);
        for (int axis = 0; axis < 3; ++axis) EXPECT_GT(rf[axis], prev[axis]);
        prev = rf;
    }
}

TEST(Encoder, GradientReachesEveryWeight) {
    S3dEncoder<float> enc(EncoderConfig{}, 17);
    tsfp::Rng rng(19);
    FT clip = random_tensor<float>({3, 8, 32, 64}, rng);
    const auto levels = enc.forward(clip);
    auto loss = tsfp::ops::mean(levels[0]);
    for (int i = 1; i < 4; ++i) loss = tsfp::ops::add(loss, tsfp::ops::mean(levels[i]));
    loss.backward();

    tsfp::ParamMap<float> params;
    enc.collect_params(params);
    for (const auto& [name, tensor] : params.items()) {
        ASSERT_TRUE(tensor.has_grad()) << name;
        bool nonzero = false;
        for (float g : tensor.grad())
            if (g != 0.0f) {
                nonzero = true;
                break;
            }
        EXPECT_TRUE(nonzero) << "all-zero gradient for " << name;
    }
}

}  // namespace
