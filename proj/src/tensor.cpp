// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/tensor.hpp"

#include <algorithm>
#include <unordered_set>

#include "textforge/error.hpp"

namespace textforge {

std::int64_t shape_numel(const Shape& shape) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

namespace detail {

std::span<float> TensorImpl::grad_buffer() {
  if (grad.empty()) grad.assign(data.size(), 0.0f);
  return grad;
}

void TensorImpl::accumulate(std::span<const float> g) {
  auto buf = grad_buffer();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] += g[i];
}

}  // namespace detail

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->data.assign(static_cast<std::size_t>(shape_numel(shape)), 0.0f);
  impl->shape = std::move(shape);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::from(Shape shape, std::vector<float> values, bool requires_grad) {
  if (shape_numel(shape) != static_cast<std::int64_t>(values.size())) {
    throw Error(ErrorCode::ShapeMismatch, "shape " + shape_str(shape) + " does not hold " +
                                              std::to_string(values.size()) + " values");
  }
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->shape = std::move(shape);
  impl->data = std::move(values);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::scalar(float v, bool requires_grad) { return from({}, {v}, requires_grad); }

std::int64_t Tensor::dim(int axis) const {
  const int r = rank();
  if (axis < 0) axis += r;
  return impl_->shape.at(static_cast<std::size_t>(axis));
}

float Tensor::item() const {
  if (numel() != 1) throw Error(ErrorCode::NotScalar, "item() on " + shape_str(shape()));
  return impl_->data[0];
}

Tensor Tensor::detach_copy() const { return from(shape(), impl_->data, false); }

namespace {
thread_local bool g_grad_enabled = true;
thread_local bool g_decisions_active = false;
thread_local std::uint64_t g_decisions_hash = 0;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_mode_enabled() { return g_grad_enabled; }

Tensor make_op_result(Shape shape, std::vector<float> data, std::vector<Tensor> inputs,
                      std::function<void(detail::TensorImpl& out)> fn) {
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->shape = std::move(shape);
  impl->data = std::move(data);
  if (g_grad_enabled) {
    bool any = false;
    for (const auto& t : inputs) any = any || (t.defined() && t.requires_grad());
    if (any) {
      impl->requires_grad = true;
      auto node = std::make_shared<detail::Node>();
      for (const auto& t : inputs) node->inputs.push_back(t.impl_ptr());
      node->backward = std::move(fn);
      impl->node = std::move(node);
    }
  }
  return Tensor(std::move(impl));
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw Error(ErrorCode::NotScalar,
                "backward() needs a scalar loss, got " +
                    (loss.defined() ? shape_str(loss.shape()) : std::string("undefined")));
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order of the tape.
  std::vector<detail::TensorImpl*> order;
  std::unordered_set<detail::TensorImpl*> seen;
  std::vector<std::pair<detail::TensorImpl*, std::size_t>> stack;
  stack.emplace_back(loss.impl(), 0);
  seen.insert(loss.impl());
  while (!stack.empty()) {
    auto& [t, next] = stack.back();
    if (t->node && next < t->node->inputs.size()) {
      detail::TensorImpl* child = t->node->inputs[next++].get();
      if (child && child->requires_grad && seen.insert(child).second) {
        stack.emplace_back(child, 0);
      }
      continue;
    }
    order.push_back(t);
    stack.pop_back();
  }

  const float one = 1.0f;
  loss.impl()->accumulate(std::span<const float>(&one, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::TensorImpl* t = *it;
    if (t->node && !t->grad.empty()) t->node->backward(*t);
  }
  // Intermediate gradients are not needed after the pass; leaves keep theirs.
  for (auto* t : order) {
    if (t->node) {
      t->grad.clear();
      t->grad.shrink_to_fit();
    }
  }
}

namespace decisions {
void begin() {
  g_decisions_active = true;
  g_decisions_hash = 0x9e3779b97f4a7c15ull;
}
std::uint64_t end() {
  g_decisions_active = false;
  return g_decisions_hash;
}
bool active() { return g_decisions_active; }
void mix(std::uint64_t v) {
  g_decisions_hash ^= v + 0x9e3779b97f4a7c15ull + (g_decisions_hash << 6) + (g_decisions_hash >> 2);
}
}  // namespace decisions

}  // namespace textforge
