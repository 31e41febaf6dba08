// tests/support/reference_attention.hpp

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

// Scalar-loop evaluation of the gated attention block, written without any
// library tensor op so it can serve as an oracle for the vectorized path.

#pragma once

#include <cmath>
#include <vector>

#include "arn/model.hpp"

namespace arn::testing {

using Matrix = std::vector<std::vector<double>>;

inline double ref_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Matrix to_matrix(const Tensor<double>& t) {
  Matrix m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) m[i][j] = t.at(i, j);
  return m;
}

// y = x W + b for a single row x.
inline std::vector<double> ref_linear(const std::vector<double>& x, const Linear<double>& l) {
  const std::size_t in = l.weight.rows(), out = l.weight.cols();
  std::vector<double> y(out);
  for (std::size_t j = 0; j < out; ++j) {
    double acc = l.bias[j];
    for (std::size_t i = 0; i < in; ++i) acc += x[i] * l.weight[i * out + j];
    y[j] = acc;
  }
  return y;
}

inline Matrix reference_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                                  const AttentionParams<double>& p, bool causal) {
  const std::size_t steps = q.size(), n = q[0].size();
  std::vector<double> vvec(n);
  for (std::size_t j = 0; j < n; ++j) vvec[j] = p.v[j];
  const auto lin_sig = ref_linear(vvec, p.lin_v_sig);
  const auto lin_tanh = ref_linear(vvec, p.lin_v_tanh);

  Matrix kp(steps, std::vector<double>(n)), qp = kp, vp = kp;
  for (std::size_t t = 0; t < steps; ++t) {
    const auto lq = ref_linear(q[t], p.lin_q);
    for (std::size_t j = 0; j < n; ++j) {
      kp[t][j] = k[t][j] * ref_sigmoid(p.k[j]);
      qp[t][j] = lq[j] * ref_sigmoid(p.q[j]);
      vp[t][j] = v[t][j] * ref_sigmoid(lin_sig[j]) * std::tanh(lin_tanh[j]);
    }
  }

  Matrix out(steps, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < steps; ++i) {
    std::vector<double> weight(steps, 0.0);
    double denom = 0;
    for (std::size_t j = 0; j < steps; ++j) {
      if (causal && j > i) continue;
      double score = 0;
      for (std::size_t d = 0; d < n; ++d) score += qp[i][d] * kp[j][d];
      weight[j] = std::exp(score / std::sqrt(static_cast<double>(n)));
      denom += weight[j];
    }
    for (std::size_t j = 0; j < steps; ++j)
      for (std::size_t d = 0; d < n; ++d) out[i][d] += weight[j] / denom * vp[j][d];
  }
  return out;
}

}  // namespace arn::testing
