// arn/ops.hpp

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
#include <random>

#include "arn/tensor.hpp"

namespace arn {

enum class Mode { Train, Eval };

using Rng = std::mt19937_64;

// Matrix product of [T x K] and [K x S]. Rank-1 operands are treated as rows.
template <typename Real>
Tensor<Real> matmul(const Tensor<Real>& a, const Tensor<Real>& b);

template <typename Real>
Tensor<Real> transpose(const Tensor<Real>& a);

// Binary ops accept identical shapes, or b of shape [C] / [1 x C] broadcast
// across the rows of a [R x C].
template <typename Real>
Tensor<Real> add(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real>
Tensor<Real> sub(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real>
Tensor<Real> mul(const Tensor<Real>& a, const Tensor<Real>& b);

template <typename Real>
Tensor<Real> scale(const Tensor<Real>& a, Real factor);

template <typename Real>
Tensor<Real> sigmoid(const Tensor<Real>& a);
template <typename Real>
Tensor<Real> tanh(const Tensor<Real>& a);
/// Exact GELU, x * Phi(x) with Phi the standard normal CDF.
template <typename Real>
Tensor<Real> gelu(const Tensor<Real>& a);
/// |x| with subgradient 0 at 0.
template <typename Real>
Tensor<Real> abs(const Tensor<Real>& a);

template <typename Real>
Tensor<Real> sum(const Tensor<Real>& a);
template <typename Real>
Tensor<Real> mean(const Tensor<Real>& a);

/// Row-wise softmax with max subtraction. -inf entries map to exactly 0.
/// Throws DegenerateRowError if a row has no finite entry.
template <typename Real>
Tensor<Real> softmax_rows(const Tensor<Real>& w);

/// Sets every entry above the main diagonal (column > row) to -inf.
template <typename Real>
Tensor<Real> causal_mask(const Tensor<Real>& w);

template <typename Real>
Tensor<Real> slice_cols(const Tensor<Real>& a, std::size_t begin, std::size_t count);
template <typename Real>
Tensor<Real> concat_cols(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real>
Tensor<Real> reverse_rows(const Tensor<Real>& a);
template <typename Real>
Tensor<Real> reshape(const Tensor<Real>& a, Shape shape);

/// Inverted dropout. Identity in eval mode or at rate 0.
template <typename Real>
Tensor<Real> dropout(const Tensor<Real>& x, double rate, Mode mode, Rng& rng);

template <typename Real>
Tensor<Real> operator+(const Tensor<Real>& a, const Tensor<Real>& b) { return add(a, b); }
template <typename Real>
Tensor<Real> operator-(const Tensor<Real>& a, const Tensor<Real>& b) { return sub(a, b); }
template <typename Real>
Tensor<Real> operator*(const Tensor<Real>& a, const Tensor<Real>& b) { return mul(a, b); }

}  // namespace arn
