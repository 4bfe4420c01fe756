// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "tsfp/common.hpp"
#include "tsfp/tensor.hpp"

namespace tsfp::testing {

template <typename T>
Tensor<T> random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<T> data(static_cast<std::size_t>(numel(shape)));
    for (auto& v : data) v = static_cast<T>(rng.uniform(lo, hi));
    return Tensor<T>::from(std::move(shape), std::move(data));
}

}  // namespace tsfp::testing
