// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Trilinear / bilinear resampling of (C, T, H, W) tensors. Output cells are
// sampled at half-pixel centers mapped onto the source sample span [0, n-1],
// so source coordinates always fall strictly inside the grid and no border
// clamping is ever needed:
//
//   src(j) = (j + 0.5) * (n_in - 1) / n_out
//
// An axis whose size does not change is passed through untouched, which makes
// same-size resizes bit-identical copies. The per-axis lerp form
// a + f * (b - a) keeps constants exact.

#pragma once

#include <cmath>
#include <vector>

#include "tsfp/tensor.hpp"

namespace tsfp {

namespace detail {

struct AxisTap {
    int lo = 0;
    int hi = 0;
    double frac = 0.0;
};

inline std::vector<AxisTap> axis_taps(int in, int out) {
    std::vector<AxisTap> taps(static_cast<std::size_t>(out));
    if (in == out) {
        for (int j = 0; j < out; ++j) taps[j] = {j, j, 0.0};
        return taps;
    }
    const double scale = static_cast<double>(in - 1) / static_cast<double>(out);
    for (int j = 0; j < out; ++j) {
        const double s = (j + 0.5) * scale;
        int lo = static_cast<int>(std::floor(s));
        if (lo > in - 2) lo = in - 2;
        if (lo < 0) lo = 0;
        taps[j] = {lo, in >= 2 ? lo + 1 : 0, in >= 2 ? s - lo : 0.0};
    }
    return taps;
}

template <typename T>
T lerp(T a, T b, T f) {
    return a + f * (b - a);
}

}  // namespace detail

template <typename T>
Tensor<T> resize_trilinear(const Tensor<T>& input, int out_t, int out_h, int out_w) {
    if (input.rank() != 4)
        throw ShapeError("rank", "resize_trilinear: expected (C,T,H,W) input, got " +
                                     shape_str(input.shape()));
    if (out_t < 1 || out_h < 1 || out_w < 1)
        throw ShapeError(out_t < 1 ? "time" : (out_h < 1 ? "height" : "width"),
                         "resize_trilinear: target dims must be positive");

    const int c_n = input.dim(0), ti = input.dim(1), hi = input.dim(2), wi = input.dim(3);
    const auto t_taps = detail::axis_taps(ti, out_t);
    const auto h_taps = detail::axis_taps(hi, out_h);
    const auto w_taps = detail::axis_taps(wi, out_w);

    const T* in_p = input.data().data();
    const std::int64_t in_plane = static_cast<std::int64_t>(ti) * hi * wi;
    std::vector<T> out(static_cast<std::size_t>(c_n) * out_t * out_h * out_w);

    std::int64_t o = 0;
    for (int c = 0; c < c_n; ++c) {
        const T* in_c = in_p + c * in_plane;
        for (int jt = 0; jt < out_t; ++jt) {
            const auto& at = t_taps[jt];
            const T ft = static_cast<T>(at.frac);
            for (int jh = 0; jh < out_h; ++jh) {
                const auto& ah = h_taps[jh];
                const T fh = static_cast<T>(ah.frac);
                for (int jw = 0; jw < out_w; ++jw, ++o) {
                    const auto& aw = w_taps[jw];
                    const T fw = static_cast<T>(aw.frac);
                    const auto sample = [&](int t, int h, int w) {
                        return in_c[(static_cast<std::int64_t>(t) * hi + h) * wi + w];
                    };
                    const T v00 = detail::lerp(sample(at.lo, ah.lo, aw.lo),
                                               sample(at.lo, ah.lo, aw.hi), fw);
                    const T v01 = detail::lerp(sample(at.lo, ah.hi, aw.lo),
                                               sample(at.lo, ah.hi, aw.hi), fw);
                    const T v10 = detail::lerp(sample(at.hi, ah.lo, aw.lo),
                                               sample(at.hi, ah.lo, aw.hi), fw);
                    const T v11 = detail::lerp(sample(at.hi, ah.hi, aw.lo),
                                               sample(at.hi, ah.hi, aw.hi), fw);
                    out[o] = detail::lerp(detail::lerp(v00, v01, fh), detail::lerp(v10, v11, fh),
                                          ft);
                }
            }
        }
    }

    auto ii = input.impl();
    return autograd::make_node<T>(
        {c_n, out_t, out_h, out_w}, std::move(out), {input},
        [ii, t_taps, h_taps, w_taps, c_n, ti, hi, wi, out_t, out_h, out_w,
         in_plane](TensorImpl<T>& node) {
            if (!ii->requires_grad) return;
            ii->ensure_grad();
            std::int64_t o = 0;
            for (int c = 0; c < c_n; ++c) {
                T* ig_c = ii->grad.data() + c * in_plane;
                for (int jt = 0; jt < out_t; ++jt) {
                    const auto& at = t_taps[jt];
                    const T ft = static_cast<T>(at.frac);
                    for (int jh = 0; jh < out_h; ++jh) {
                        const auto& ah = h_taps[jh];
                        const T fh = static_cast<T>(ah.frac);
                        for (int jw = 0; jw < out_w; ++jw, ++o) {
                            const auto& aw = w_taps[jw];
                            const T fw = static_cast<T>(aw.frac);
                            const T g = node.grad[o];
                            if (g == T(0)) continue;
                            const T wt[2] = {T(1) - ft, ft};
                            const T wh[2] = {T(1) - fh, fh};
                            const T ww[2] = {T(1) - fw, fw};
                            const int it[2] = {at.lo, at.hi};
                            const int ih[2] = {ah.lo, ah.hi};
                            const int iw[2] = {aw.lo, aw.hi};
                            for (int a = 0; a < 2; ++a)
                                for (int b = 0; b < 2; ++b)
                                    for (int d = 0; d < 2; ++d) {
                                        const T wgt = wt[a] * wh[b] * ww[d];
                                        if (wgt == T(0)) continue;
                                        ig_c[(static_cast<std::int64_t>(it[a]) * hi + ih[b]) * wi +
                                             iw[d]] += g * wgt;
                                    }
                        }
                    }
                }
            }
        });
}

// Spatial-only resampling of a time-collapsed tensor (C, 1, H, W).
template <typename T>
Tensor<T> resize_bilinear(const Tensor<T>& input, int out_h, int out_w) {
    if (input.rank() != 4)
        throw ShapeError("rank", "resize_bilinear: expected (C,1,H,W) input, got " +
                                     shape_str(input.shape()));
    if (input.dim(1) != 1)
        throw ShapeError("time", "resize_bilinear: time axis must be collapsed to 1, got " +
                                     std::to_string(input.dim(1)));
    return resize_trilinear(input, 1, out_h, out_w);
}

}  // namespace tsfp
