// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable elementwise ops, reductions and the small set of broadcast
// forms the saliency network needs. Binary ops require equal shapes; the only
// broadcasts are tensor-scalar, scalar-tensor (a {1} tensor against all
// elements) and the channel broadcast used by the attention map.

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "tsfp/tensor.hpp"

namespace tsfp::ops {

namespace detail {

template <typename T>
void check_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
    if (a.shape() != b.shape())
        throw ShapeError("shape", std::string(op) + ": operand shapes differ, " +
                                      shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

template <typename T>
T sigmoid_scalar(T x) {
    T s;
    if (x >= T(0)) {
        s = T(1) / (T(1) + std::exp(-x));
    } else {
        const T e = std::exp(x);
        s = e / (T(1) + e);
    }
    // Keep the output strictly inside (0,1) even where exp saturates.
    const T lo = std::numeric_limits<T>::min();
    const T hi = T(1) - std::numeric_limits<T>::epsilon() / T(2);
    return std::min(hi, std::max(lo, s));
}

}  // namespace detail

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
    std::vector<T> out(x.data().begin(), x.data().end());
    for (auto& v : out) v = v > T(0) ? v : T(0);
    auto xi = x.impl();
    return autograd::make_node<T>(x.shape(), std::move(out), {x}, [xi](TensorImpl<T>& node) {
        if (!xi->requires_grad) return;
        xi->ensure_grad();
        for (std::size_t i = 0; i < node.data.size(); ++i)
            if (xi->data[i] > T(0)) xi->grad[i] += node.grad[i];
    });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
    std::vector<T> out(x.size());
    for (std::int64_t i = 0; i < x.size(); ++i) out[i] = detail::sigmoid_scalar(x.data()[i]);
    auto xi = x.impl();
    return autograd::make_node<T>(x.shape(), std::move(out), {x}, [xi](TensorImpl<T>& node) {
        if (!xi->requires_grad) return;
        xi->ensure_grad();
        for (std::size_t i = 0; i < node.data.size(); ++i) {
            const T s = node.data[i];
            xi->grad[i] += node.grad[i] * s * (T(1) - s);
        }
    });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    detail::check_same_shape("add", a, b);
    std::vector<T> out(a.size());
    for (std::int64_t i = 0; i < a.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    auto ai = a.impl(), bi = b.impl();
    return autograd::make_node<T>(a.shape(), std::move(out), {a, b}, [ai, bi](TensorImpl<T>& node) {
        if (ai->requires_grad) {
            ai->ensure_grad();
            for (std::size_t i = 0; i < node.data.size(); ++i) ai->grad[i] += node.grad[i];
        }
        if (bi->requires_grad) {
            bi->ensure_grad();
            for (std::size_t i = 0; i < node.data.size(); ++i) bi->grad[i] += node.grad[i];
        }
    });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    detail::check_same_shape("sub", a, b);
    std::vector<T> out(a.size());
    for (std::int64_t i = 0; i < a.size(); ++i) out[i] = a.data()[i] - b.data()[i];
    auto ai = a.impl(), bi = b.impl();
    return autograd::make_node<T>(a.shape(), std::move(out), {a, b}, [ai, bi](TensorImpl<T>& node) {
        if (ai->requires_grad) {
            ai->ensure_grad();
            for (std::size_t i = 0; i < node.data.size(); ++i) ai->grad[i] += node.grad[i];
        }
        if (bi->requires_grad) {
            bi->ensure_grad();
            for (std::size_t i = 0; i < node.data.size(); ++i) bi->grad[i] -= node.grad[i];
        }
    });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    detail::check_same_shape("mul", a, b);
    std::vector<T> out(a.size());
    for (std::int64_t i = 0; i < a.size(); ++i) out[i] = a.data()[i] * b.data()[i];
    auto ai = a.impl(), bi = b.impl();
    return autograd::make_node<T>(a.shape(), std::move(out), {a, b}, [ai, bi](TensorImpl<T>& node) {
        if (ai->requires_grad) {
            ai->ensure_grad();
            for (std::size_t i = 0; i < node.data.size(); ++i)
                ai->grad[i] += node.grad[i] * bi->data[i];
        }
        if (bi->requires_grad) {
            bi->ensure_grad();
            for (std::size_t i = 0; i < node.data.size(); ++i)
                bi->grad[i] += node.grad[i] * ai->data[i];
        }
    });
}

template <typename T>
Tensor<T> scalar_mul(const Tensor<T>& x, T c) {
    std::vector<T> out(x.size());
    for (std::int64_t i = 0; i < x.size(); ++i) out[i] = x.data()[i] * c;
    auto xi = x.impl();
    return autograd::make_node<T>(x.shape(), std::move(out), {x}, [xi, c](TensorImpl<T>& node) {
        if (!xi->requires_grad) return;
        xi->ensure_grad();
        for (std::size_t i = 0; i < node.data.size(); ++i) xi->grad[i] += node.grad[i] * c;
    });
}

template <typename T>
Tensor<T> scalar_add(const Tensor<T>& x, T c) {
    std::vector<T> out(x.size());
    for (std::int64_t i = 0; i < x.size(); ++i) out[i] = x.data()[i] + c;
    auto xi = x.impl();
    return autograd::make_node<T>(x.shape(), std::move(out), {x}, [xi](TensorImpl<T>& node) {
        if (!xi->requires_grad) return;
        xi->ensure_grad();
        for (std::size_t i = 0; i < node.data.size(); ++i) xi->grad[i] += node.grad[i];
    });
}

// max(x, floor); subgradient 0 on the clamped side and at the boundary.
template <typename T>
Tensor<T> clamp_min(const Tensor<T>& x, T floor) {
    std::vector<T> out(x.size());
    for (std::int64_t i = 0; i < x.size(); ++i) out[i] = std::max(x.data()[i], floor);
    auto xi = x.impl();
    return autograd::make_node<T>(x.shape(), std::move(out), {x}, [xi, floor](TensorImpl<T>& node) {
        if (!xi->requires_grad) return;
        xi->ensure_grad();
        for (std::size_t i = 0; i < node.data.size(); ++i)
            if (xi->data[i] > floor) xi->grad[i] += node.grad[i];
    });
}

// Natural log; callers clamp the argument away from zero first.
template <typename T>
Tensor<T> log(const Tensor<T>& x) {
    std::vector<T> out(x.size());
    for (std::int64_t i = 0; i < x.size(); ++i) out[i] = std::log(x.data()[i]);
    auto xi = x.impl();
    return autograd::make_node<T>(x.shape(), std::move(out), {x}, [xi](TensorImpl<T>& node) {
        if (!xi->requires_grad) return;
        xi->ensure_grad();
        for (std::size_t i = 0; i < node.data.size(); ++i)
            xi->grad[i] += node.grad[i] / xi->data[i];
    });
}

template <typename T>
Tensor<T> sqrt(const Tensor<T>& x) {
    std::vector<T> out(x.size());
    for (std::int64_t i = 0; i < x.size(); ++i) out[i] = std::sqrt(x.data()[i]);
    auto xi = x.impl();
    return autograd::make_node<T>(x.shape(), std::move(out), {x}, [xi](TensorImpl<T>& node) {
        if (!xi->requires_grad) return;
        xi->ensure_grad();
        for (std::size_t i = 0; i < node.data.size(); ++i)
            xi->grad[i] += node.grad[i] / (T(2) * node.data[i]);
    });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
    T total = T(0);
    for (std::int64_t i = 0; i < x.size(); ++i) total += x.data()[i];
    auto xi = x.impl();
    return autograd::make_node<T>({1}, {total}, {x}, [xi](TensorImpl<T>& node) {
        if (!xi->requires_grad) return;
        xi->ensure_grad();
        const T g = node.grad[0];
        for (auto& v : xi->grad) v += g;
    });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& x) {
    T total = T(0);
    for (std::int64_t i = 0; i < x.size(); ++i) total += x.data()[i];
    const T inv = T(1) / static_cast<T>(x.size());
    auto xi = x.impl();
    return autograd::make_node<T>({1}, {total * inv}, {x}, [xi, inv](TensorImpl<T>& node) {
        if (!xi->requires_grad) return;
        xi->ensure_grad();
        const T g = node.grad[0] * inv;
        for (auto& v : xi->grad) v += g;
    });
}

namespace detail {

template <typename T>
void check_scalar(const char* op, const Tensor<T>& s) {
    if (s.size() != 1)
        throw ShapeError("elements", std::string(op) + ": broadcast operand must be a scalar "
                                                       "tensor, got " +
                                         shape_str(s.shape()));
}

}  // namespace detail

// x - s with s a {1} tensor broadcast over every element.
template <typename T>
Tensor<T> sub_bcast(const Tensor<T>& x, const Tensor<T>& s) {
    detail::check_scalar("sub_bcast", s);
    const T sv = s.data()[0];
    std::vector<T> out(x.size());
    for (std::int64_t i = 0; i < x.size(); ++i) out[i] = x.data()[i] - sv;
    auto xi = x.impl(), si = s.impl();
    return autograd::make_node<T>(x.shape(), std::move(out), {x, s}, [xi, si](TensorImpl<T>& node) {
        if (xi->requires_grad) {
            xi->ensure_grad();
            for (std::size_t i = 0; i < node.data.size(); ++i) xi->grad[i] += node.grad[i];
        }
        if (si->requires_grad) {
            si->ensure_grad();
            T acc = T(0);
            for (std::size_t i = 0; i < node.data.size(); ++i) acc += node.grad[i];
            si->grad[0] -= acc;
        }
    });
}

template <typename T>
Tensor<T> mul_bcast(const Tensor<T>& x, const Tensor<T>& s) {
    detail::check_scalar("mul_bcast", s);
    const T sv = s.data()[0];
    std::vector<T> out(x.size());
    for (std::int64_t i = 0; i < x.size(); ++i) out[i] = x.data()[i] * sv;
    auto xi = x.impl(), si = s.impl();
    return autograd::make_node<T>(x.shape(), std::move(out), {x, s}, [xi, si](TensorImpl<T>& node) {
        const T sv2 = si->data[0];
        if (xi->requires_grad) {
            xi->ensure_grad();
            for (std::size_t i = 0; i < node.data.size(); ++i) xi->grad[i] += node.grad[i] * sv2;
        }
        if (si->requires_grad) {
            si->ensure_grad();
            T acc = T(0);
            for (std::size_t i = 0; i < node.data.size(); ++i) acc += node.grad[i] * xi->data[i];
            si->grad[0] += acc;
        }
    });
}

template <typename T>
Tensor<T> div_bcast(const Tensor<T>& x, const Tensor<T>& s) {
    detail::check_scalar("div_bcast", s);
    const T sv = s.data()[0];
    std::vector<T> out(x.size());
    for (std::int64_t i = 0; i < x.size(); ++i) out[i] = x.data()[i] / sv;
    auto xi = x.impl(), si = s.impl();
    return autograd::make_node<T>(x.shape(), std::move(out), {x, s}, [xi, si](TensorImpl<T>& node) {
        const T sv2 = si->data[0];
        if (xi->requires_grad) {
            xi->ensure_grad();
            for (std::size_t i = 0; i < node.data.size(); ++i) xi->grad[i] += node.grad[i] / sv2;
        }
        if (si->requires_grad) {
            si->ensure_grad();
            T acc = T(0);
            for (std::size_t i = 0; i < node.data.size(); ++i)
                acc += node.grad[i] * xi->data[i];
            si->grad[0] -= acc / (sv2 * sv2);
        }
    });
}

// Same data, new shape; gradient passes through untouched.
template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
    if (numel(shape) != x.size())
        throw ShapeError("elements", "reshape: cannot view " + shape_str(x.shape()) + " as " +
                                         shape_str(shape));
    std::vector<T> out(x.data().begin(), x.data().end());
    auto xi = x.impl();
    return autograd::make_node<T>(std::move(shape), std::move(out), {x},
                                  [xi](TensorImpl<T>& node) {
                                      if (!xi->requires_grad) return;
                                      xi->ensure_grad();
                                      for (std::size_t i = 0; i < node.data.size(); ++i)
                                          xi->grad[i] += node.grad[i];
                                  });
}

// out(c, p) = x(c, p) * m(p); m has shape (1, T, H, W) and is broadcast over
// channels.
template <typename T>
Tensor<T> mul_channel_bcast(const Tensor<T>& x, const Tensor<T>& m) {
    if (x.rank() != 4 || m.rank() != 4 || m.dim(0) != 1 || m.dim(1) != x.dim(1) ||
        m.dim(2) != x.dim(2) || m.dim(3) != x.dim(3))
        throw ShapeError("channels", "mul_channel_bcast: map " + shape_str(m.shape()) +
                                         " does not broadcast over " + shape_str(x.shape()));
    const std::int64_t channels = x.dim(0);
    const std::int64_t plane = m.size();
    std::vector<T> out(x.size());
    for (std::int64_t c = 0; c < channels; ++c)
        for (std::int64_t p = 0; p < plane; ++p)
            out[c * plane + p] = x.data()[c * plane + p] * m.data()[p];
    auto xi = x.impl(), mi = m.impl();
    return autograd::make_node<T>(
        x.shape(), std::move(out), {x, m}, [xi, mi, channels, plane](TensorImpl<T>& node) {
            if (xi->requires_grad) {
                xi->ensure_grad();
                for (std::int64_t c = 0; c < channels; ++c)
                    for (std::int64_t p = 0; p < plane; ++p)
                        xi->grad[c * plane + p] += node.grad[c * plane + p] * mi->data[p];
            }
            if (mi->requires_grad) {
                mi->ensure_grad();
                for (std::int64_t p = 0; p < plane; ++p) {
                    T acc = T(0);
                    for (std::int64_t c = 0; c < channels; ++c)
                        acc += node.grad[c * plane + p] * xi->data[c * plane + p];
                    mi->grad[p] += acc;
                }
            }
        });
}

// Mean over all non-channel axes: (C, T, H, W) -> (C).
template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
    if (x.rank() != 4)
        throw ShapeError("rank", "global_avg_pool: expected rank-4 input, got " +
                                     shape_str(x.shape()));
    const std::int64_t channels = x.dim(0);
    const std::int64_t plane = x.size() / channels;
    const T inv = T(1) / static_cast<T>(plane);
    std::vector<T> out(static_cast<std::size_t>(channels));
    for (std::int64_t c = 0; c < channels; ++c) {
        T acc = T(0);
        for (std::int64_t p = 0; p < plane; ++p) acc += x.data()[c * plane + p];
        out[c] = acc * inv;
    }
    auto xi = x.impl();
    return autograd::make_node<T>({static_cast<int>(channels)}, std::move(out), {x},
                                  [xi, channels, plane, inv](TensorImpl<T>& node) {
                                      if (!xi->requires_grad) return;
                                      xi->ensure_grad();
                                      for (std::int64_t c = 0; c < channels; ++c) {
                                          const T g = node.grad[c] * inv;
                                          for (std::int64_t p = 0; p < plane; ++p)
                                              xi->grad[c * plane + p] += g;
                                      }
                                  });
}

// Per-location bilinear form: out(p) = sum_c sum_d v(c,p) * w(c,d) * a(d),
// with v of shape (C, T, H, W), w of shape (C, D) and a of shape (D). The
// result has shape (1, T, H, W).
template <typename T>
Tensor<T> bilinear_form(const Tensor<T>& v, const Tensor<T>& w, const Tensor<T>& a) {
    if (v.rank() != 4)
        throw ShapeError("rank", "bilinear_form: features must be rank 4, got " +
                                     shape_str(v.shape()));
    if (w.rank() != 2 || a.rank() != 1 || w.dim(0) != v.dim(0) || w.dim(1) != a.dim(0))
        throw ShapeError("channels", "bilinear_form: weight " + shape_str(w.shape()) +
                                         " incompatible with features " + shape_str(v.shape()) +
                                         " and audio " + shape_str(a.shape()));
    const std::int64_t channels = v.dim(0);
    const std::int64_t dims = a.dim(0);
    const std::int64_t plane = v.size() / channels;

    // u = w * a, one coefficient per feature channel.
    std::vector<T> u(static_cast<std::size_t>(channels), T(0));
    for (std::int64_t c = 0; c < channels; ++c)
        for (std::int64_t d = 0; d < dims; ++d)
            u[c] += w.data()[c * dims + d] * a.data()[d];

    std::vector<T> out(static_cast<std::size_t>(plane), T(0));
    for (std::int64_t c = 0; c < channels; ++c)
        for (std::int64_t p = 0; p < plane; ++p) out[p] += v.data()[c * plane + p] * u[c];

    auto vi = v.impl(), wi = w.impl(), ai = a.impl();
    Shape out_shape{1, v.dim(1), v.dim(2), v.dim(3)};
    return autograd::make_node<T>(
        std::move(out_shape), std::move(out), {v, w, a},
        [vi, wi, ai, channels, dims, plane, u](TensorImpl<T>& node) {
            // r(c) = sum_p g(p) v(c,p) feeds both the weight and audio grads.
            std::vector<T> r(static_cast<std::size_t>(channels), T(0));
            const bool need_r = wi->requires_grad || ai->requires_grad;
            if (need_r)
                for (std::int64_t c = 0; c < channels; ++c)
                    for (std::int64_t p = 0; p < plane; ++p)
                        r[c] += node.grad[p] * vi->data[c * plane + p];
            if (vi->requires_grad) {
                vi->ensure_grad();
                for (std::int64_t c = 0; c < channels; ++c)
                    for (std::int64_t p = 0; p < plane; ++p)
                        vi->grad[c * plane + p] += node.grad[p] * u[c];
            }
            if (wi->requires_grad) {
                wi->ensure_grad();
                for (std::int64_t c = 0; c < channels; ++c)
                    for (std::int64_t d = 0; d < dims; ++d)
                        wi->grad[c * dims + d] += r[c] * ai->data[d];
            }
            if (ai->requires_grad) {
                ai->ensure_grad();
                for (std::int64_t d = 0; d < dims; ++d) {
                    T acc = T(0);
                    for (std::int64_t c = 0; c < channels; ++c)
                        acc += r[c] * wi->data[c * dims + d];
                    ai->grad[d] += acc;
                }
            }
        });
}

template <typename T>
struct Stats {
    T sum;
    T mean;
    T std;  // population standard deviation
};

// Plain (non-differentiable) whole-tensor statistics.
template <typename T>
Stats<T> reduce_stats(const Tensor<T>& x) {
    if (x.size() == 0) throw ShapeError("elements", "reduce_stats: empty tensor");
    T total = T(0);
    for (std::int64_t i = 0; i < x.size(); ++i) total += x.data()[i];
    const T m = total / static_cast<T>(x.size());
    T sq = T(0);
    for (std::int64_t i = 0; i < x.size(); ++i) {
        const T d = x.data()[i] - m;
        sq += d * d;
    }
    return {total, m, std::sqrt(sq / static_cast<T>(x.size()))};
}

}  // namespace tsfp::ops
