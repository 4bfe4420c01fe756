// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Audio side of the audio-visual model: a strided 1-D convolution stack with
// global average pooling produces a fixed-size sound embedding; a bilinear
// form against the stage-3 visual features yields a per-location attention
// logit, squashed by sigmoid. Waveforms ride through the 3D machinery as
// (C, 1, 1, L) tensors.

#pragma once

#include <string>
#include <vector>

#include "tsfp/layers.hpp"
#include "tsfp/resize.hpp"

namespace tsfp {

struct AudioConfig {
    int feature_dim = 64;
    int layers = 5;
    int kernel = 9;
    int stride = 4;
    int base_channels = 8;  // doubled per layer, capped at feature_dim

    void validate() const {
        if (feature_dim < 1 || layers < 1 || kernel < 1 || stride < 1 || base_channels < 1)
            throw ConfigError("audio: all config values must be positive");
    }
};

template <typename T>
class AudioEncoder {
public:
    AudioEncoder() = default;

    AudioEncoder(const AudioConfig& config, Rng& rng) : cfg_(config) {
        cfg_.validate();
        int in_ch = 1;
        int rf = 1, jump = 1;
        for (int i = 0; i < cfg_.layers; ++i) {
            const int out_ch = i + 1 == cfg_.layers
                                   ? cfg_.feature_dim
                                   : std::min(cfg_.base_channels << i, cfg_.feature_dim);
            ConvSpec spec;
            spec.in_channels = in_ch;
            spec.out_channels = out_ch;
            spec.kernel = {1, 1, cfg_.kernel};
            spec.stride = {1, 1, cfg_.stride};
            spec.padding = {0, 0, cfg_.kernel / 2};
            convs_.push_back(Conv3dLayer<T>::make(spec, rng));
            in_ch = out_ch;
            rf += (cfg_.kernel - 1) * jump;
            jump *= cfg_.stride;
        }
        min_samples_ = rf;
    }

    // Waveforms shorter than the receptive field of one deepest-layer unit
    // are zero-padded up to it; *padded reports when that happened.
    int min_samples() const { return min_samples_; }

    Tensor<T> forward(const Tensor<T>& wave, bool* padded = nullptr) const {
        if (wave.rank() != 4 || wave.dim(0) != 1 || wave.dim(1) != 1 || wave.dim(2) != 1)
            throw ShapeError("rank", "audio: expected (1,1,1,L) waveform, got " +
                                         shape_str(wave.shape()));
        if (wave.dim(3) < 1) throw ShapeError("width", "audio: empty waveform");
        Tensor<T> x = wave;
        if (wave.dim(3) < min_samples_) {
            std::vector<T> data(static_cast<std::size_t>(min_samples_), T(0));
            for (int i = 0; i < wave.dim(3); ++i) data[i] = wave.data()[i];
            Tensor<T> grown = Tensor<T>::from({1, 1, 1, min_samples_}, std::move(data));
            grown.set_requires_grad(wave.requires_grad());
            x = grown;
            if (padded) *padded = true;
        } else if (padded) {
            *padded = false;
        }
        for (const auto& conv : convs_) x = ops::relu(conv(x));
        return ops::global_avg_pool(x);
    }

    void collect_params(ParamMap<T>& params, const std::string& prefix = "aud") const {
        for (std::size_t i = 0; i < convs_.size(); ++i)
            convs_[i].collect(params, prefix + ".conv" + std::to_string(i + 1));
    }

    const AudioConfig& config() const { return cfg_; }

private:
    AudioConfig cfg_;
    std::vector<Conv3dLayer<T>> convs_;
    int min_samples_ = 1;
};

// Bilinear audio-visual fusion: logit(p) = f(:,p)^T W a, attention = sigmoid.
template <typename T>
struct BilinearFusion {
    Tensor<T> weight;  // (C_visual, D_audio)

    static BilinearFusion make(int visual_channels, int audio_dim, Rng& rng) {
        BilinearFusion fusion;
        fusion.weight = init::uniform_fan_in<T>({visual_channels, audio_dim},
                                                static_cast<std::int64_t>(visual_channels) *
                                                    audio_dim,
                                                rng);
        return fusion;
    }

    Tensor<T> attention(const Tensor<T>& visual, const Tensor<T>& audio_features) const {
        return ops::sigmoid(ops::bilinear_form(visual, weight, audio_features));
    }

    void collect_params(ParamMap<T>& params) const { params.add("fuse.W", weight); }
};

// out = v (*) attn + v, with attn broadcast over channels.
template <typename T>
Tensor<T> apply_audio_attention(const Tensor<T>& v, const Tensor<T>& attention) {
    return ops::add(ops::mul_channel_bcast(v, attention), v);
}

}  // namespace tsfp
