// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace textforge {

using Shape = std::vector<std::int64_t>;

std::int64_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

class Tensor;

namespace detail {

struct TensorImpl;

/// Tape node: the inputs an op consumed and how to push the output gradient
/// back into them.
struct Node {
  std::vector<std::shared_ptr<TensorImpl>> inputs;
  std::function<void(TensorImpl& out)> backward;
};

struct TensorImpl {
  Shape shape;
  std::vector<float> data;
  std::vector<float> grad;  // empty until the first accumulation
  bool requires_grad = false;
  std::shared_ptr<Node> node;

  void accumulate(std::span<const float> g);
  std::span<float> grad_buffer();  // allocates (zeroed) on demand
};

}  // namespace detail

/// Dense row-major float32 tensor with optional reverse-mode autodiff.
///
/// Tensor is a shared handle: copies alias the same storage, which is how
/// parameters are shared between modules.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<float> values, bool requires_grad = false);
  static Tensor scalar(float v, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  std::int64_t dim(int axis) const;
  int rank() const { return static_cast<int>(impl_->shape.size()); }
  std::int64_t numel() const { return static_cast<std::int64_t>(impl_->data.size()); }

  std::span<float> data() { return impl_->data; }
  std::span<const float> data() const { return impl_->data; }
  const std::vector<float>& values() const { return impl_->data; }
  float item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool v) { impl_->requires_grad = v; }
  bool has_grad() const { return !impl_->grad.empty(); }
  /// Gradient buffer; empty span when no gradient has reached this tensor.
  std::span<const float> grad() const { return impl_->grad; }
  std::span<float> mutable_grad() { return impl_->grad; }
  /// Drops the gradient buffer entirely (has_grad() becomes false).
  void clear_grad() { impl_->grad.clear(); }

  /// Value copy with no tape linkage.
  Tensor detach_copy() const;

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

  detail::TensorImpl* impl() const { return impl_.get(); }
  const std::shared_ptr<detail::TensorImpl>& impl_ptr() const { return impl_; }
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<detail::TensorImpl> impl_;
};

/// Integer tensor for ids and labels. No gradients.
struct IdTensor {
  Shape shape;
  std::vector<std::int32_t> data;

  IdTensor() = default;
  IdTensor(Shape s, std::vector<std::int32_t> d) : shape(std::move(s)), data(std::move(d)) {}
  static IdTensor zeros(Shape s) {
    const auto n = shape_numel(s);
    return {std::move(s), std::vector<std::int32_t>(static_cast<std::size_t>(n), 0)};
  }
  std::int64_t dim(int axis) const { return shape.at(static_cast<std::size_t>(axis)); }
  bool operator==(const IdTensor&) const = default;
};

/// Reverse-mode pass from a scalar loss. Gradients accumulate into every
/// reachable tensor with requires_grad; callers zero them between steps.
void backward(const Tensor& loss);

/// While alive, ops on this thread record no tape nodes.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_mode_enabled();

/// Records a new op output. `inputs` that require grad are linked on the tape
/// (unless grad mode is off); `fn` receives the output impl during backward.
Tensor make_op_result(Shape shape, std::vector<float> data, std::vector<Tensor> inputs,
                      std::function<void(detail::TensorImpl& out)> fn);

/// Branch fingerprint used by the finite-difference oracle to detect
/// perturbations that cross a non-differentiable point (relu sign, max-pool
/// winner). Ops feed their discrete decisions in while recording is active.
namespace decisions {
void begin();
std::uint64_t end();
bool active();
void mix(std::uint64_t v);
}  // namespace decisions

}  // namespace textforge
