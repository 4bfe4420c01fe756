// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Central finite-difference gradient checking. Meant to run on double tensors;
// float lacks the headroom for the 1e-4 acceptance threshold.

#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "tsfp/tensor.hpp"

namespace tsfp {

// Compares reverse-mode gradients of a deterministic scalar-valued function
// against (f(x+eps) - f(x-eps)) / (2 eps), one coordinate at a time. Returns
// the maximum over all coordinates of
//   |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
template <typename T>
double gradient_check(const std::function<Tensor<T>(const std::vector<Tensor<T>>&)>& f,
                      std::vector<Tensor<T>> inputs, T eps = T(1e-5)) {
    for (auto& in : inputs) {
        in.set_requires_grad(true);
        in.zero_grad();
    }

    Tensor<T> out = f(inputs);
    if (out.size() != 1)
        throw ShapeError("elements", "gradient_check: f must return a scalar");
    if (!std::isfinite(static_cast<double>(out.item())))
        throw std::runtime_error("gradient_check: non-finite value at base point");
    out.backward();

    std::vector<std::vector<T>> analytic;
    analytic.reserve(inputs.size());
    for (auto& in : inputs) {
        auto g = in.raw_grad();
        analytic.emplace_back(g.begin(), g.end());
    }

    const auto eval = [&]() {
        autograd::NoGradGuard guard;
        const T value = f(inputs).item();
        if (!std::isfinite(static_cast<double>(value)))
            throw std::runtime_error("gradient_check: non-finite value at probe point");
        return value;
    };

    double max_err = 0.0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        auto data = inputs[k].raw_data();
        for (std::size_t i = 0; i < data.size(); ++i) {
            const T saved = data[i];
            data[i] = saved + eps;
            const T up = eval();
            data[i] = saved - eps;
            const T down = eval();
            data[i] = saved;
            const double numeric = static_cast<double>(up - down) / (2.0 * static_cast<double>(eps));
            const double a = static_cast<double>(analytic[k][i]);
            const double denom = std::max(1e-8, std::abs(a) + std::abs(numeric));
            max_err = std::max(max_err, std::abs(a - numeric) / denom);
        }
    }
    return max_err;
}

}  // namespace tsfp
