// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense N-d tensor with reverse-mode automatic differentiation. A Tensor is a
// cheap shared handle onto an immutable value buffer plus an optional gradient
// buffer. Ops record parents and a backward closure; Tensor::backward() walks
// the graph in reverse topological order and accumulates gradients additively
// (running backward twice without zeroing doubles every gradient).

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tsfp/common.hpp"

namespace tsfp {

template <typename T>
struct TensorImpl {
    Shape shape;
    std::vector<T> data;
    std::vector<T> grad;  // empty until first needed; same length as data after
    bool requires_grad = false;

    // Graph edges, populated only while grad mode is on and a parent requires
    // grad. backward_fn reads this node's grad and accumulates into parents.
    std::vector<std::shared_ptr<TensorImpl<T>>> parents;
    std::function<void(TensorImpl<T>&)> backward_fn;

    void ensure_grad() {
        if (grad.empty()) grad.assign(data.size(), T(0));
    }
};

namespace autograd {

// Thread-local switch; predictions and evaluation run with grads off so no
// graph is retained and intermediates free eagerly.
inline bool& grad_mode() {
    thread_local bool enabled = true;
    return enabled;
}

struct NoGradGuard {
    NoGradGuard() : prev_(grad_mode()) { grad_mode() = false; }
    ~NoGradGuard() { grad_mode() = prev_; }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

}  // namespace autograd

template <typename T>
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<TensorImpl<T>> impl) : impl_(std::move(impl)) {}

    static Tensor zeros(Shape shape, bool requires_grad = false) {
        return filled(std::move(shape), T(0), requires_grad);
    }

    static Tensor filled(Shape shape, T value, bool requires_grad = false) {
        auto impl = std::make_shared<TensorImpl<T>>();
        impl->data.assign(static_cast<std::size_t>(numel(shape)), value);
        impl->shape = std::move(shape);
        impl->requires_grad = requires_grad;
        return Tensor(std::move(impl));
    }

    static Tensor from(Shape shape, std::vector<T> data, bool requires_grad = false) {
        if (static_cast<std::int64_t>(data.size()) != numel(shape))
            throw ShapeError("elements", "tensor data length " + std::to_string(data.size()) +
                                              " does not match shape " + shape_str(shape));
        auto impl = std::make_shared<TensorImpl<T>>();
        impl->shape = std::move(shape);
        impl->data = std::move(data);
        impl->requires_grad = requires_grad;
        return Tensor(std::move(impl));
    }

    bool defined() const { return impl_ != nullptr; }
    const Shape& shape() const { return impl_->shape; }
    int dim(int axis) const { return impl_->shape[static_cast<std::size_t>(axis)]; }
    int rank() const { return static_cast<int>(impl_->shape.size()); }
    std::int64_t size() const { return static_cast<std::int64_t>(impl_->data.size()); }

    std::span<const T> data() const { return impl_->data; }
    // Raw mutable access; callers own the aliasing discipline (initialization
    // and optimizer steps only — everything else treats tensors as immutable).
    std::span<T> raw_data() { return impl_->data; }

    bool requires_grad() const { return impl_->requires_grad; }
    void set_requires_grad(bool value) { impl_->requires_grad = value; }

    bool has_grad() const { return !impl_->grad.empty(); }
    std::span<const T> grad() const { return impl_->grad; }
    std::span<T> raw_grad() {
        impl_->ensure_grad();
        return impl_->grad;
    }
    void zero_grad() {
        if (!impl_->grad.empty()) std::fill(impl_->grad.begin(), impl_->grad.end(), T(0));
    }

    T item() const {
        if (size() != 1)
            throw ShapeError("elements", "item() requires a single-element tensor, got " +
                                             shape_str(shape()));
        return impl_->data[0];
    }

    // Reverse-mode pass seeded with d(out)/d(out) = 1. Only valid on scalars.
    // Leaf gradients accumulate across calls; interior node gradients are
    // transient and reset at the start of every pass.
    void backward() {
        if (size() != 1)
            throw ShapeError("elements", "backward() requires a scalar output, got " +
                                             shape_str(shape()));
        if (!impl_->requires_grad) return;

        std::vector<TensorImpl<T>*> order;
        topo_sort(order);
        for (TensorImpl<T>* node : order)
            if (node->backward_fn && !node->grad.empty())
                std::fill(node->grad.begin(), node->grad.end(), T(0));
        impl_->ensure_grad();
        impl_->grad[0] += T(1);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            if ((*it)->backward_fn) (*it)->backward_fn(**it);
        }
    }

    const std::shared_ptr<TensorImpl<T>>& impl() const { return impl_; }

private:
    void topo_sort(std::vector<TensorImpl<T>*>& order) const {
        // Iterative post-order DFS over parents.
        std::unordered_set<TensorImpl<T>*> visited;
        std::vector<std::pair<TensorImpl<T>*, std::size_t>> stack;
        stack.emplace_back(impl_.get(), 0);
        visited.insert(impl_.get());
        while (!stack.empty()) {
            auto& [node, child] = stack.back();
            if (child < node->parents.size()) {
                TensorImpl<T>* next = node->parents[child++].get();
                if (next->requires_grad && visited.insert(next).second)
                    stack.emplace_back(next, 0);
            } else {
                order.push_back(node);
                stack.pop_back();
            }
        }
    }

    std::shared_ptr<TensorImpl<T>> impl_;
};

namespace autograd {

// Builds an op result node. The backward closure is retained only when grad
// mode is on and some parent actually requires grad; otherwise the result is a
// detached value and parents can be freed as soon as callers drop them.
template <typename T>
Tensor<T> make_node(Shape shape, std::vector<T> data, std::vector<Tensor<T>> parents,
                    std::function<void(TensorImpl<T>&)> backward_fn) {
    Tensor<T> out = Tensor<T>::from(std::move(shape), std::move(data));
    bool needs = false;
    if (grad_mode()) {
        for (const auto& p : parents)
            if (p.requires_grad()) {
                needs = true;
                break;
            }
    }
    if (needs) {
        out.set_requires_grad(true);
        auto& impl = *out.impl();
        impl.parents.reserve(parents.size());
        for (auto& p : parents) impl.parents.push_back(p.impl());
        impl.backward_fn = std::move(backward_fn);
    }
    return out;
}

// Accumulate helper used inside backward closures.
template <typename T>
void add_grad(const std::shared_ptr<TensorImpl<T>>& node, std::size_t index, T value) {
    if (!node->requires_grad) return;
    node->ensure_grad();
    node->grad[index] += value;
}

}  // namespace autograd

}  // namespace tsfp
