// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Four-stage separable-3D convolutional encoder. A stem (separable conv with
// spatial stride 2, then 1x2x2 max-pool) brings the input to 1/4 resolution;
// each stage then halves space once more starting from stage 2, so the level
// scales are /4, /8, /16, /32 of the input. Temporal strides follow the
// configured ledger (default 1,2,2,1: the two deepest levels sit at T/4).

#pragma once

#include <array>
#include <string>
#include <vector>

#include "tsfp/layers.hpp"

namespace tsfp {

struct EncoderConfig {
    std::array<int, 4> stage_channels{16, 32, 64, 96};
    std::array<int, 4> stage_temporal_stride{1, 2, 2, 1};
    std::array<int, 4> blocks_per_stage{1, 1, 2, 2};
    bool separable = true;
    int in_channels = 3;

    int temporal_stride_product() const {
        int p = 1;
        for (int s : stage_temporal_stride) p *= s;
        return p;
    }
    // Stem conv (x2) + stem pool (x2) + one spatial halving per stage after
    // the first.
    static constexpr int spatial_stride_product() { return 32; }

    void validate() const {
        for (int c : stage_channels)
            if (c < 1) throw ConfigError("encoder: stage channels must be positive");
        for (int s : stage_temporal_stride)
            if (s < 1) throw ConfigError("encoder: temporal strides must be >= 1");
        for (int b : blocks_per_stage)
            if (b < 1) throw ConfigError("encoder: blocks per stage must be >= 1");
        if (in_channels < 1) throw ConfigError("encoder: input channels must be positive");
    }
};

template <typename T>
class S3dEncoder {
public:
    S3dEncoder() = default;

    S3dEncoder(const EncoderConfig& config, std::uint64_t seed) : cfg_(config) {
        cfg_.validate();
        Rng rng(seed);
        stem_ = ConvBlock<T>::make(cfg_.in_channels, cfg_.stage_channels[0], {3, 3, 3},
                                   {1, 2, 2}, {1, 1, 1}, cfg_.separable, rng);
        int in_ch = cfg_.stage_channels[0];
        for (int s = 0; s < 4; ++s) {
            std::vector<ConvBlock<T>> blocks;
            for (int b = 0; b < cfg_.blocks_per_stage[s]; ++b) {
                const bool first = b == 0;
                const Triple stride{first ? cfg_.stage_temporal_stride[s] : 1,
                                    first && s > 0 ? 2 : 1, first && s > 0 ? 2 : 1};
                blocks.push_back(ConvBlock<T>::make(in_ch, cfg_.stage_channels[s], {3, 3, 3},
                                                    stride, {1, 1, 1}, cfg_.separable, rng));
                in_ch = cfg_.stage_channels[s];
            }
            stages_[s] = std::move(blocks);
        }
    }

    const EncoderConfig& config() const { return cfg_; }

    void check_input_dims(const Shape& shape) const {
        if (shape.size() != 4 || shape[0] != cfg_.in_channels)
            throw ShapeError("channels", "encoder: expected (" + std::to_string(cfg_.in_channels) +
                                             ",T,H,W) clip, got " + shape_str(shape));
        const int tp = cfg_.temporal_stride_product();
        if (shape[1] % tp != 0)
            throw ShapeError("time", "encoder: clip length " + std::to_string(shape[1]) +
                                         " not divisible by temporal stride product " +
                                         std::to_string(tp));
        if (shape[2] % EncoderConfig::spatial_stride_product() != 0)
            throw ShapeError("height", "encoder: height " + std::to_string(shape[2]) +
                                           " not divisible by 32");
        if (shape[3] % EncoderConfig::spatial_stride_product() != 0)
            throw ShapeError("width", "encoder: width " + std::to_string(shape[3]) +
                                          " not divisible by 32");
    }

    std::array<Tensor<T>, 4> forward(const Tensor<T>& clip) const {
        check_input_dims(clip.shape());
        Tensor<T> x = stem_(clip);
        x = maxpool3d(x, {1, 2, 2}, {1, 2, 2});
        std::array<Tensor<T>, 4> levels;
        for (int s = 0; s < 4; ++s) {
            for (const auto& block : stages_[s]) x = block(x);
            levels[s] = x;
        }
        return levels;
    }

    // Level shapes by stride arithmetic, no forward pass required.
    std::array<Shape, 4> level_shapes(int t, int h, int w) const {
        check_input_dims({cfg_.in_channels, t, h, w});
        std::array<Shape, 4> shapes;
        int ct = t, ch = h / 4, cw = w / 4;
        for (int s = 0; s < 4; ++s) {
            ct /= cfg_.stage_temporal_stride[s];
            if (s > 0) {
                ch /= 2;
                cw /= 2;
            }
            shapes[s] = Shape{cfg_.stage_channels[s], ct, ch, cw};
        }
        return shapes;
    }

    // Per-axis receptive field (t, h, w) of one unit at the given level,
    // accumulated over the stem and every convolution/pool up to and
    // including that stage.
    std::array<int, 3> receptive_field(int level) const {
        std::array<int, 3> rf{1, 1, 1};
        std::array<int, 3> jump{1, 1, 1};
        const auto apply = [&](int axis, int k, int s) {
            rf[axis] += (k - 1) * jump[axis];
            jump[axis] *= s;
        };
        const auto conv_block = [&](Triple kernel, Triple stride) {
            // Separable split does not change the receptive field ledger.
            apply(0, kernel.t, stride.t);
            apply(1, kernel.h, stride.h);
            apply(2, kernel.w, stride.w);
        };
        conv_block({3, 3, 3}, {1, 2, 2});  // stem conv
        apply(1, 2, 2);                    // stem pool
        apply(2, 2, 2);
        for (int s = 0; s <= level; ++s)
            for (int b = 0; b < cfg_.blocks_per_stage[s]; ++b) {
                const bool first = b == 0;
                conv_block({3, 3, 3}, {first ? cfg_.stage_temporal_stride[s] : 1,
                                       first && s > 0 ? 2 : 1, first && s > 0 ? 2 : 1});
            }
        return rf;
    }

    void collect_params(ParamMap<T>& params) const {
        stem_.collect(params, "enc.stem");
        for (int s = 0; s < 4; ++s)
            for (std::size_t b = 0; b < stages_[s].size(); ++b)
                stages_[s][b].collect(params, "enc.stage" + std::to_string(s + 1) + ".block" +
                                                  std::to_string(b + 1));
    }

private:
    EncoderConfig cfg_;
    ConvBlock<T> stem_;
    std::array<std::vector<ConvBlock<T>>, 4> stages_;
};

}  // namespace tsfp
