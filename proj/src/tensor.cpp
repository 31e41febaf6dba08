// src/tensor.cpp

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

#include "arn/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "arn/error.hpp"

namespace arn {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

namespace {
thread_local bool g_grad_enabled = true;

void check_shape(const Shape& shape) {
  for (auto d : shape)
    if (d == 0) throw DimensionError("tensor extents must be positive, got " + shape_str(shape));
}
}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <typename Real>
Tensor<Real>::Tensor(Shape shape, Real fill, bool requires_grad)
    : impl_(std::make_shared<detail::TensorImpl<Real>>()) {
  check_shape(shape);
  impl_->data.assign(shape_numel(shape), fill);
  impl_->shape = std::move(shape);
  impl_->requires_grad = requires_grad;
}

template <typename Real>
Tensor<Real>::Tensor(Shape shape, std::vector<Real> values, bool requires_grad)
    : impl_(std::make_shared<detail::TensorImpl<Real>>()) {
  check_shape(shape);
  if (shape_numel(shape) != values.size())
    throw DimensionError("shape " + shape_str(shape) + " does not hold " +
                         std::to_string(values.size()) + " values");
  impl_->shape = std::move(shape);
  impl_->data = std::move(values);
  impl_->requires_grad = requires_grad;
}

template <typename Real>
Tensor<Real> Tensor<Real>::scalar(Real value, bool requires_grad) {
  return Tensor(Shape{}, std::vector<Real>{value}, requires_grad);
}

template <typename Real>
Tensor<Real> Tensor<Real>::row(std::vector<Real> values, bool requires_grad) {
  const std::size_t n = values.size();
  return Tensor(Shape{1, n}, std::move(values), requires_grad);
}

template <typename Real>
std::size_t Tensor<Real>::rows() const {
  const auto& s = impl_->shape;
  if (s.size() == 2) return s[0];
  if (s.size() <= 1) return 1;
  throw RankError("rows() on tensor of shape " + shape_str(s));
}

template <typename Real>
std::size_t Tensor<Real>::cols() const {
  const auto& s = impl_->shape;
  if (s.size() == 2) return s[1];
  if (s.size() == 1) return s[0];
  if (s.empty()) return 1;
  throw RankError("cols() on tensor of shape " + shape_str(s));
}

template <typename Real>
Real Tensor<Real>::item() const {
  if (numel() != 1) throw RankError("item() on tensor of shape " + shape_str(shape()));
  return impl_->data[0];
}

template <typename Real>
std::span<Real> Tensor<Real>::mutable_grad() const {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), Real(0));
  return impl_->grad;
}

template <typename Real>
void Tensor<Real>::zero_grad() {
  std::fill(impl_->grad.begin(), impl_->grad.end(), Real(0));
}

template <typename Real>
Tensor<Real> Tensor<Real>::clone() const {
  return Tensor(impl_->shape, impl_->data, false);
}

template <typename Real>
Tensor<Real> record(Shape shape, std::vector<Real> values, std::vector<Tensor<Real>> inputs,
                    const char* op, std::function<void(std::span<const Real>)> backward_fn) {
  Tensor<Real> out(std::move(shape), std::move(values));
  if (!g_grad_enabled) return out;
  const bool track = std::any_of(inputs.begin(), inputs.end(),
                                 [](const Tensor<Real>& t) { return t.requires_grad(); });
  if (!track) return out;
  auto node = std::make_shared<detail::Node<Real>>();
  node->op = op;
  node->inputs = std::move(inputs);
  node->backward = std::move(backward_fn);
  out.impl()->requires_grad = true;
  out.impl()->node = std::move(node);
  return out;
}

template <typename Real>
void backward(const Tensor<Real>& loss) {
  if (loss.numel() != 1)
    throw RankError("backward() requires a scalar, got " + shape_str(loss.shape()));
  if (!loss.requires_grad()) throw Error("backward() on a tensor that does not require gradients");

  using Impl = detail::TensorImpl<Real>;
  // Iterative post-order DFS; reversing it yields a topological order in
  // which every node is visited once, after all of its consumers.
  std::vector<Impl*> order;
  std::unordered_set<Impl*> seen;
  std::vector<std::pair<Impl*, std::size_t>> stack;
  stack.emplace_back(loss.impl(), 0);
  seen.insert(loss.impl());
  while (!stack.empty()) {
    auto& [impl, next] = stack.back();
    const auto* node = impl->node.get();
    if (node && next < node->inputs.size()) {
      Impl* child = node->inputs[next++].impl();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
      continue;
    }
    order.push_back(impl);
    stack.pop_back();
  }

  Tensor<Real> root = loss;
  root.mutable_grad()[0] += Real(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Impl* impl = *it;
    if (!impl->node || impl->grad.empty()) continue;
    impl->node->backward(impl->grad);
  }
}

template class Tensor<float>;
template class Tensor<double>;
template Tensor<float> record(Shape, std::vector<float>, std::vector<Tensor<float>>, const char*,
                              std::function<void(std::span<const float>)>);
template Tensor<double> record(Shape, std::vector<double>, std::vector<Tensor<double>>,
                               const char*, std::function<void(std::span<const double>)>);
template void backward(const Tensor<float>&);
template void backward(const Tensor<double>&);

}  // namespace arn
