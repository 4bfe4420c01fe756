// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// 3D convolution and max-pooling over (C, T, H, W) tensors. Both directions
// are written as gathers over disjoint output ranges, so intra-op parallelism
// never changes results.

#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "tsfp/ops.hpp"
#include "tsfp/tensor.hpp"

namespace tsfp {

struct Triple {
    int t = 1;
    int h = 1;
    int w = 1;
};

struct ConvSpec {
    int in_channels = 0;
    int out_channels = 0;
    Triple kernel{1, 1, 1};
    Triple stride{1, 1, 1};
    Triple padding{0, 0, 0};
    // Marks the S3D factorization (spatial 1xKhxKw then temporal Ktx1x1);
    // realized by layers::SeparableConv3d, not by a single conv3d call.
    bool separable = false;
};

namespace detail {

inline int conv_out_dim(const char* axis, int in, int k, int s, int p) {
    const int out = (in + 2 * p - k) / s + 1;
    if (in + 2 * p < k || out < 1)
        throw ShapeError(axis, std::string("conv3d: ") + axis + " axis collapses: in=" +
                                   std::to_string(in) + " kernel=" + std::to_string(k) +
                                   " stride=" + std::to_string(s) +
                                   " pad=" + std::to_string(p));
    return out;
}

}  // namespace detail

inline Shape conv3d_output_shape(const Shape& in, const ConvSpec& spec) {
    if (in.size() != 4)
        throw ShapeError("rank", "conv3d: expected (C,T,H,W) input, got " + shape_str(in));
    if (in[0] != spec.in_channels)
        throw ShapeError("channels", "conv3d: input has " + std::to_string(in[0]) +
                                         " channels, spec expects " +
                                         std::to_string(spec.in_channels));
    return Shape{spec.out_channels,
                 detail::conv_out_dim("time", in[1], spec.kernel.t, spec.stride.t, spec.padding.t),
                 detail::conv_out_dim("height", in[2], spec.kernel.h, spec.stride.h, spec.padding.h),
                 detail::conv_out_dim("width", in[3], spec.kernel.w, spec.stride.w, spec.padding.w)};
}

template <typename T>
Tensor<T> conv3d(const Tensor<T>& input, const ConvSpec& spec, const Tensor<T>& weight,
                 const Tensor<T>& bias) {
    const Shape out_shape = conv3d_output_shape(input.shape(), spec);
    const Shape want_w{spec.out_channels, spec.in_channels, spec.kernel.t, spec.kernel.h,
                       spec.kernel.w};
    if (weight.shape() != want_w)
        throw ShapeError("kernel", "conv3d: weight shape " + shape_str(weight.shape()) +
                                       " does not match spec " + shape_str(want_w));
    if (bias.shape() != Shape{spec.out_channels})
        throw ShapeError("channels", "conv3d: bias shape " + shape_str(bias.shape()) +
                                         " does not match out_channels " +
                                         std::to_string(spec.out_channels));

    const int ci_n = spec.in_channels, co_n = spec.out_channels;
    const int ti = input.dim(1), hi = input.dim(2), wi = input.dim(3);
    const int to = out_shape[1], ho = out_shape[2], wo = out_shape[3];
    const int kt = spec.kernel.t, kh = spec.kernel.h, kw = spec.kernel.w;
    const int st = spec.stride.t, sh = spec.stride.h, sw = spec.stride.w;
    const int pt = spec.padding.t, ph = spec.padding.h, pw = spec.padding.w;
    const std::int64_t in_plane = static_cast<std::int64_t>(ti) * hi * wi;
    const std::int64_t out_plane = static_cast<std::int64_t>(to) * ho * wo;
    const std::int64_t k_vol = static_cast<std::int64_t>(kt) * kh * kw;

    const T* in_p = input.data().data();
    const T* w_p = weight.data().data();
    const T* b_p = bias.data().data();
    std::vector<T> out(static_cast<std::size_t>(co_n) * out_plane);

    parallel_for(static_cast<std::int64_t>(co_n) * to, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t job = begin; job < end; ++job) {
            const int co = static_cast<int>(job / to);
            const int ot = static_cast<int>(job % to);
            for (int oh = 0; oh < ho; ++oh)
                for (int ow = 0; ow < wo; ++ow) {
                    T acc = b_p[co];
                    for (int ci = 0; ci < ci_n; ++ci) {
                        const T* in_c = in_p + ci * in_plane;
                        const T* w_c = w_p + (static_cast<std::int64_t>(co) * ci_n + ci) * k_vol;
                        for (int dt = 0; dt < kt; ++dt) {
                            const int it = ot * st - pt + dt;
                            if (it < 0 || it >= ti) continue;
                            for (int dh = 0; dh < kh; ++dh) {
                                const int ih = oh * sh - ph + dh;
                                if (ih < 0 || ih >= hi) continue;
                                const T* in_row =
                                    in_c + (static_cast<std::int64_t>(it) * hi + ih) * wi;
                                const T* w_row =
                                    w_c + (static_cast<std::int64_t>(dt) * kh + dh) * kw;
                                for (int dw = 0; dw < kw; ++dw) {
                                    const int iw = ow * sw - pw + dw;
                                    if (iw < 0 || iw >= wi) continue;
                                    acc += in_row[iw] * w_row[dw];
                                }
                            }
                        }
                    }
                    out[(static_cast<std::int64_t>(co) * to + ot) * ho * wo + oh * wo + ow] = acc;
                }
        }
    }, /*grain=*/1);

    auto ii = input.impl(), wimpl = weight.impl(), bimpl = bias.impl();
    return autograd::make_node<T>(
        out_shape, std::move(out), {input, weight, bias},
        [=](TensorImpl<T>& node) {
            const T* g_p = node.grad.data();
            if (bimpl->requires_grad) {
                bimpl->ensure_grad();
                for (int co = 0; co < co_n; ++co) {
                    T acc = T(0);
                    const T* g_c = g_p + co * out_plane;
                    for (std::int64_t i = 0; i < out_plane; ++i) acc += g_c[i];
                    bimpl->grad[co] += acc;
                }
            }
            if (wimpl->requires_grad) {
                wimpl->ensure_grad();
                T* wg = wimpl->grad.data();
                parallel_for(co_n, [&](std::int64_t begin, std::int64_t end) {
                    for (std::int64_t co = begin; co < end; ++co) {
                        const T* g_c = g_p + co * out_plane;
                        for (int ci = 0; ci < ci_n; ++ci) {
                            const T* in_c = ii->data.data() + ci * in_plane;
                            T* wg_c = wg + (co * ci_n + ci) * k_vol;
                            for (int dt = 0; dt < kt; ++dt)
                                for (int dh = 0; dh < kh; ++dh)
                                    for (int dw = 0; dw < kw; ++dw) {
                                        T acc = T(0);
                                        for (int ot = 0; ot < to; ++ot) {
                                            const int it = ot * st - pt + dt;
                                            if (it < 0 || it >= ti) continue;
                                            for (int oh = 0; oh < ho; ++oh) {
                                                const int ih = oh * sh - ph + dh;
                                                if (ih < 0 || ih >= hi) continue;
                                                const T* in_row =
                                                    in_c + (static_cast<std::int64_t>(it) * hi + ih) * wi;
                                                const T* g_row =
                                                    g_c + (static_cast<std::int64_t>(ot) * ho + oh) * wo;
                                                for (int ow = 0; ow < wo; ++ow) {
                                                    const int iw = ow * sw - pw + dw;
                                                    if (iw < 0 || iw >= wi) continue;
                                                    acc += g_row[ow] * in_row[iw];
                                                }
                                            }
                                        }
                                        wg_c[(static_cast<std::int64_t>(dt) * kh + dh) * kw + dw] += acc;
                                    }
                        }
                    }
                }, /*grain=*/1);
            }
            if (ii->requires_grad) {
                ii->ensure_grad();
                T* ig = ii->grad.data();
                parallel_for(ci_n, [&](std::int64_t begin, std::int64_t end) {
                    for (std::int64_t ci = begin; ci < end; ++ci) {
                        T* ig_c = ig + ci * in_plane;
                        for (int it = 0; it < ti; ++it)
                            for (int ih = 0; ih < hi; ++ih)
                                for (int iw = 0; iw < wi; ++iw) {
                                    T acc = T(0);
                                    for (int dt = 0; dt < kt; ++dt) {
                                        const int nt = it + pt - dt;
                                        if (nt < 0 || nt % st != 0) continue;
                                        const int ot = nt / st;
                                        if (ot >= to) continue;
                                        for (int dh = 0; dh < kh; ++dh) {
                                            const int nh = ih + ph - dh;
                                            if (nh < 0 || nh % sh != 0) continue;
                                            const int oh = nh / sh;
                                            if (oh >= ho) continue;
                                            for (int dw = 0; dw < kw; ++dw) {
                                                const int nw = iw + pw - dw;
                                                if (nw < 0 || nw % sw != 0) continue;
                                                const int ow = nw / sw;
                                                if (ow >= wo) continue;
                                                for (int co = 0; co < co_n; ++co) {
                                                    const T g = node.grad[(static_cast<std::int64_t>(co) * to + ot) * ho * wo + oh * wo + ow];
                                                    acc += g * wimpl->data[((static_cast<std::int64_t>(co) * ci_n + ci) * kt + dt) * kh * kw + dh * kw + dw];
                                                }
                                            }
                                        }
                                    }
                                    ig_c[(static_cast<std::int64_t>(it) * hi + ih) * wi + iw] += acc;
                                }
                    }
                }, /*grain=*/1);
            }
        });
}

// Max pooling with floor semantics: every window lies fully inside the input,
// no implicit padding. The gradient routes to the first flattened index of the
// window that attains the maximum.
template <typename T>
Tensor<T> maxpool3d(const Tensor<T>& input, Triple kernel, Triple stride) {
    if (input.rank() != 4)
        throw ShapeError("rank", "maxpool3d: expected (C,T,H,W) input, got " +
                                     shape_str(input.shape()));
    const int c_n = input.dim(0), ti = input.dim(1), hi = input.dim(2), wi = input.dim(3);
    const auto out_dim = [](const char* axis, int in, int k, int s) {
        if (k > in)
            throw ShapeError(axis, std::string("maxpool3d: kernel ") + std::to_string(k) +
                                       " exceeds " + axis + " extent " + std::to_string(in));
        return (in - k) / s + 1;
    };
    const int to = out_dim("time", ti, kernel.t, stride.t);
    const int ho = out_dim("height", hi, kernel.h, stride.h);
    const int wo = out_dim("width", wi, kernel.w, stride.w);

    std::vector<T> out(static_cast<std::size_t>(c_n) * to * ho * wo);
    auto argmax = std::make_shared<std::vector<std::int64_t>>(out.size());
    const T* in_p = input.data().data();
    const std::int64_t in_plane = static_cast<std::int64_t>(ti) * hi * wi;

    std::int64_t o = 0;
    for (int c = 0; c < c_n; ++c)
        for (int ot = 0; ot < to; ++ot)
            for (int oh = 0; oh < ho; ++oh)
                for (int ow = 0; ow < wo; ++ow, ++o) {
                    T best = -std::numeric_limits<T>::infinity();
                    std::int64_t best_i = -1;
                    for (int dt = 0; dt < kernel.t; ++dt)
                        for (int dh = 0; dh < kernel.h; ++dh)
                            for (int dw = 0; dw < kernel.w; ++dw) {
                                const std::int64_t idx =
                                    c * in_plane +
                                    (static_cast<std::int64_t>(ot * stride.t + dt) * hi +
                                     (oh * stride.h + dh)) * wi +
                                    (ow * stride.w + dw);
                                if (in_p[idx] > best) {
                                    best = in_p[idx];
                                    best_i = idx;
                                }
                            }
                    out[o] = best;
                    (*argmax)[o] = best_i;
                }

    auto ii = input.impl();
    return autograd::make_node<T>({c_n, to, ho, wo}, std::move(out), {input},
                                  [ii, argmax](TensorImpl<T>& node) {
                                      if (!ii->requires_grad) return;
                                      ii->ensure_grad();
                                      for (std::size_t i = 0; i < node.data.size(); ++i)
                                          ii->grad[(*argmax)[i]] += node.grad[i];
                                  });
}

}  // namespace tsfp
