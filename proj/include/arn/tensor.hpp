// arn/tensor.hpp

// Copyright 2026  ARN contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace arn {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

template <typename Real>
class Tensor;

namespace detail {

template <typename Real>
struct Node {
  const char* op = "";
  std::vector<Tensor<Real>> inputs;
  // Called with d(loss)/d(output); accumulates into the inputs' gradients.
  std::function<void(std::span<const Real>)> backward;
};

template <typename Real>
struct TensorImpl {
  Shape shape;
  std::vector<Real> data;
  std::vector<Real> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::shared_ptr<Node<Real>> node;
};

}  // namespace detail

/// Dense row-major array with an optional gradient slot and a link to the
/// operation that produced it. Copies share storage (handle semantics);
/// use clone() or detach() for an independent value.
template <typename Real>
class Tensor {
 public:
  using value_type = Real;

  Tensor() = default;
  explicit Tensor(Shape shape, Real fill = Real(0), bool requires_grad = false);
  Tensor(Shape shape, std::vector<Real> values, bool requires_grad = false);

  static Tensor scalar(Real value, bool requires_grad = false);
  static Tensor row(std::vector<Real> values, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t numel() const { return impl_->data.size(); }
  // Rank-2 helpers; a rank-1 tensor is treated as a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<Real> data() { return impl_->data; }
  std::span<const Real> data() const { return impl_->data; }
  Real& operator[](std::size_t i) { return impl_->data[i]; }
  Real operator[](std::size_t i) const { return impl_->data[i]; }
  Real at(std::size_t r, std::size_t c) const { return impl_->data[r * cols() + c]; }
  Real item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool on) { impl_->requires_grad = on; }
  bool has_grad() const { return !impl_->grad.empty(); }
  std::span<const Real> grad() const { return impl_->grad; }
  // Gradient buffer, allocated (zero) on first use.
  std::span<Real> mutable_grad() const;
  void zero_grad();
  void clear_grad() { impl_->grad.clear(); }

  bool is_leaf() const { return impl_->node == nullptr; }
  const detail::Node<Real>* node() const { return impl_->node.get(); }

  Tensor clone() const;
  Tensor detach() const { return clone(); }
  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

  detail::TensorImpl<Real>* impl() const { return impl_.get(); }

 private:
  std::shared_ptr<detail::TensorImpl<Real>> impl_;
};

/// Graph recording is on by default and can be switched off per thread.
bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Builds the result of a differentiable operation. A graph node is attached
/// only when recording is enabled and some input requires gradients.
template <typename Real>
Tensor<Real> record(Shape shape, std::vector<Real> values,
                    std::vector<Tensor<Real>> inputs, const char* op,
                    std::function<void(std::span<const Real>)> backward);

/// Reverse-mode sweep from a scalar. Leaves that require gradients receive
/// d(loss)/d(leaf) added to whatever their grad buffer already holds.
template <typename Real>
void backward(const Tensor<Real>& loss);

}  // namespace arn
