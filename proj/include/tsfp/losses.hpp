// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Training losses: KL divergence between sum-normalized maps, negative
// Pearson correlation, and negative normalized scanpath saliency, combined as
//   L = L_KL + alpha1 * L_CC + alpha2 * L_NSS.
//
// KL sees sum-normalized maps (the network emits per-pixel sigmoids, KL is
// scale-dependent); CC and NSS standardize the raw map so their values are
// invariant under positive affine transforms of it. Log arguments, sum
// denominators and standard deviations are floored at 1e-8; degenerate inputs
// (constant maps) yield flagged finite values instead of NaN so training
// never silently poisons gradients.

#pragma once

#include <cmath>
#include <stdexcept>

#include "tsfp/ops.hpp"

namespace tsfp {

struct LossWeights {
    enum class Mode { combined, kl_only };
    double alpha1 = 0.5;
    double alpha2 = 0.1;
    Mode mode = Mode::combined;
};

template <typename T>
struct LossValue {
    Tensor<T> value;  // scalar, graph-connected unless degenerate
    bool degenerate = false;
};

namespace detail {

constexpr double kLossEpsilon = 1e-8;

// sigma = sqrt(max(var, eps^2)) keeps the floor at 1e-8 while staying
// differentiable (flooring sigma itself would put sqrt's infinite slope at 0
// on the backward path).
template <typename T>
Tensor<T> stddev_floored(const Tensor<T>& centered) {
    auto var = ops::mean(ops::mul(centered, centered));
    return ops::sqrt(ops::clamp_min(var, static_cast<T>(kLossEpsilon * kLossEpsilon)));
}

}  // namespace detail

// Eq-style KL divergence over sum-normalized maps; 0 * ln(0/q) contributes 0.
template <typename T>
LossValue<T> loss_kl(const Tensor<T>& saliency, const Tensor<T>& density) {
    if (saliency.shape() != density.shape())
        throw ShapeError("shape", "loss_kl: map shapes differ, " + shape_str(saliency.shape()) +
                                      " vs " + shape_str(density.shape()));
    const T eps = static_cast<T>(detail::kLossEpsilon);
    auto s_norm = ops::div_bcast(saliency, ops::clamp_min(ops::sum(saliency), eps));
    auto g_norm = ops::div_bcast(density, ops::clamp_min(ops::sum(density), eps));
    auto log_ratio = ops::sub(ops::log(ops::clamp_min(g_norm, eps)),
                              ops::log(ops::clamp_min(s_norm, eps)));
    return {ops::sum(ops::mul(g_norm, log_ratio)), false};
}

// -cov(S,G) / (sigma_S * sigma_G) with population statistics over raw values.
template <typename T>
LossValue<T> loss_cc(const Tensor<T>& saliency, const Tensor<T>& density) {
    if (saliency.shape() != density.shape())
        throw ShapeError("shape", "loss_cc: map shapes differ, " + shape_str(saliency.shape()) +
                                      " vs " + shape_str(density.shape()));
    const bool degenerate =
        ops::reduce_stats(saliency).std < detail::kLossEpsilon ||
        ops::reduce_stats(density).std < detail::kLossEpsilon;
    auto ds = ops::sub_bcast(saliency, ops::mean(saliency));
    auto dg = ops::sub_bcast(density, ops::mean(density));
    auto cov = ops::mean(ops::mul(ds, dg));
    auto denom = ops::mul(detail::stddev_floored(ds), detail::stddev_floored(dg));
    return {ops::scalar_mul(ops::div_bcast(cov, denom), T(-1)), degenerate};
}

// -(1/N) sum_x s(x) F(x) with s the standardized map and N the fixation
// count. Zero fixations leave the metric undefined and throw; a constant map
// yields a flagged zero.
template <typename T>
LossValue<T> loss_nss(const Tensor<T>& saliency, const Tensor<T>& fixations) {
    if (saliency.shape() != fixations.shape())
        throw ShapeError("shape", "loss_nss: map shapes differ, " + shape_str(saliency.shape()) +
                                      " vs " + shape_str(fixations.shape()));
    std::int64_t n_fix = 0;
    for (auto v : fixations.data())
        if (v != T(0)) ++n_fix;
    if (n_fix == 0) throw std::invalid_argument("loss_nss: fixation map has no fixations");
    if (ops::reduce_stats(saliency).std < detail::kLossEpsilon)
        return {Tensor<T>::zeros({1}), true};

    auto ds = ops::sub_bcast(saliency, ops::mean(saliency));
    auto standardized = ops::div_bcast(ds, detail::stddev_floored(ds));
    auto hit_sum = ops::sum(ops::mul(standardized, fixations));
    return {ops::scalar_mul(hit_sum, static_cast<T>(-1.0 / static_cast<double>(n_fix))), false};
}

template <typename T>
struct LossBreakdown {
    Tensor<T> total;  // scalar graph node to backpropagate
    double kl = 0.0;
    double cc = 0.0;
    double nss = 0.0;
    bool cc_degenerate = false;
    bool nss_degenerate = false;
};

template <typename T>
LossBreakdown<T> loss_total(const Tensor<T>& saliency, const Tensor<T>& fixations,
                            const Tensor<T>& density, const LossWeights& weights) {
    LossBreakdown<T> out;
    auto kl = loss_kl(saliency, density);
    out.kl = static_cast<double>(kl.value.item());
    if (weights.mode == LossWeights::Mode::kl_only) {
        auto cc = loss_cc(saliency, density);
        auto nss = loss_nss(saliency, fixations);
        out.cc = static_cast<double>(cc.value.item());
        out.nss = static_cast<double>(nss.value.item());
        out.cc_degenerate = cc.degenerate;
        out.nss_degenerate = nss.degenerate;
        out.total = kl.value;
        return out;
    }
    auto cc = loss_cc(saliency, density);
    auto nss = loss_nss(saliency, fixations);
    out.cc = static_cast<double>(cc.value.item());
    out.nss = static_cast<double>(nss.value.item());
    out.cc_degenerate = cc.degenerate;
    out.nss_degenerate = nss.degenerate;
    out.total = ops::add(kl.value,
                         ops::add(ops::scalar_mul(cc.value, static_cast<T>(weights.alpha1)),
                                  ops::scalar_mul(nss.value, static_cast<T>(weights.alpha2))));
    return out;
}

}  // namespace tsfp
