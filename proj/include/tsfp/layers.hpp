// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Named parameter registry plus the two convolution building blocks the
// network is assembled from.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "tsfp/conv.hpp"
#include "tsfp/ops.hpp"

namespace tsfp {

// Ordered name -> tensor registry. Registration order is the construction
// order, which keeps optimizer state and checkpoints deterministic.
template <typename T>
class ParamMap {
public:
    void add(std::string name, Tensor<T> tensor) {
        if (find(name)) throw std::runtime_error("duplicate parameter name: " + name);
        items_.emplace_back(std::move(name), std::move(tensor));
    }

    Tensor<T>* find(const std::string& name) {
        for (auto& [n, t] : items_)
            if (n == name) return &t;
        return nullptr;
    }

    const std::vector<std::pair<std::string, Tensor<T>>>& items() const { return items_; }
    std::vector<std::pair<std::string, Tensor<T>>>& items() { return items_; }

    std::int64_t total_elements() const {
        std::int64_t n = 0;
        for (const auto& [name, t] : items_) n += t.size();
        return n;
    }

    void zero_grads() {
        for (auto& [name, t] : items_) t.zero_grad();
    }

private:
    std::vector<std::pair<std::string, Tensor<T>>> items_;
};

namespace init {

// Fan-in-scaled uniform initialization, U(-sqrt(6/fan_in), +sqrt(6/fan_in)).
template <typename T>
Tensor<T> uniform_fan_in(Shape shape, std::int64_t fan_in, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::vector<T> data(static_cast<std::size_t>(numel(shape)));
    for (auto& v : data) v = static_cast<T>(rng.uniform(-bound, bound));
    Tensor<T> t = Tensor<T>::from(std::move(shape), std::move(data));
    t.set_requires_grad(true);
    return t;
}

}  // namespace init

template <typename T>
struct Conv3dLayer {
    ConvSpec spec;
    Tensor<T> weight;
    Tensor<T> bias;

    static Conv3dLayer make(ConvSpec spec, Rng& rng) {
        Conv3dLayer layer;
        layer.spec = spec;
        const std::int64_t fan_in = static_cast<std::int64_t>(spec.in_channels) * spec.kernel.t *
                                    spec.kernel.h * spec.kernel.w;
        layer.weight = init::uniform_fan_in<T>(
            {spec.out_channels, spec.in_channels, spec.kernel.t, spec.kernel.h, spec.kernel.w},
            fan_in, rng);
        layer.bias = Tensor<T>::zeros({spec.out_channels}, /*requires_grad=*/true);
        return layer;
    }

    Tensor<T> operator()(const Tensor<T>& x) const { return conv3d(x, spec, weight, bias); }

    void collect(ParamMap<T>& params, const std::string& prefix) const {
        params.add(prefix + ".w", weight);
        params.add(prefix + ".b", bias);
    }
};

// The encoder/decoder unit. In separable mode this is the S3D factorization:
// a spatial 1xKhxKw convolution followed by a temporal Ktx1x1 convolution,
// each followed by relu. Spatial stride/padding ride on the spatial half,
// temporal stride/padding on the temporal half. Dense mode is a single full
// KtxKhxKw convolution + relu.
template <typename T>
struct ConvBlock {
    bool separable = true;
    Conv3dLayer<T> spatial;   // separable only
    Conv3dLayer<T> temporal;  // separable only
    Conv3dLayer<T> dense;     // !separable only

    static ConvBlock make(int in_ch, int out_ch, Triple kernel, Triple stride, Triple padding,
                          bool separable, Rng& rng) {
        ConvBlock block;
        block.separable = separable;
        if (separable) {
            ConvSpec sp;
            sp.in_channels = in_ch;
            sp.out_channels = out_ch;
            sp.kernel = {1, kernel.h, kernel.w};
            sp.stride = {1, stride.h, stride.w};
            sp.padding = {0, padding.h, padding.w};
            sp.separable = true;
            block.spatial = Conv3dLayer<T>::make(sp, rng);

            ConvSpec tp;
            tp.in_channels = out_ch;
            tp.out_channels = out_ch;
            tp.kernel = {kernel.t, 1, 1};
            tp.stride = {stride.t, 1, 1};
            tp.padding = {padding.t, 0, 0};
            tp.separable = true;
            block.temporal = Conv3dLayer<T>::make(tp, rng);
        } else {
            ConvSpec d;
            d.in_channels = in_ch;
            d.out_channels = out_ch;
            d.kernel = kernel;
            d.stride = stride;
            d.padding = padding;
            block.dense = Conv3dLayer<T>::make(d, rng);
        }
        return block;
    }

    Tensor<T> operator()(const Tensor<T>& x) const {
        if (separable) return ops::relu(temporal(ops::relu(spatial(x))));
        return ops::relu(dense(x));
    }

    Shape output_shape(const Shape& in) const {
        if (separable)
            return conv3d_output_shape(conv3d_output_shape(in, spatial.spec), temporal.spec);
        return conv3d_output_shape(in, dense.spec);
    }

    void collect(ParamMap<T>& params, const std::string& prefix) const {
        if (separable) {
            spatial.collect(params, prefix + ".spatial");
            temporal.collect(params, prefix + ".temporal");
        } else {
            dense.collect(params, prefix + ".dense");
        }
    }
};

}  // namespace tsfp
