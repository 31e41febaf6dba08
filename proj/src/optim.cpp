// src/optim.cpp

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

#include "arn/optim.hpp"

#include <cmath>
#include <string>

#include "arn/error.hpp"

namespace arn {

template <typename Real>
AdamState<Real> AdamState<Real>::for_params(const std::vector<Tensor<Real>>& params) {
  AdamState state;
  for (const auto& p : params) {
    state.m.emplace_back(p.numel(), Real(0));
    state.v.emplace_back(p.numel(), Real(0));
  }
  return state;
}

template <typename Real>
void adam_step(std::vector<Tensor<Real>>& params, AdamState<Real>& state, double lr) {
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw DimensionError("adam_step: state holds " + std::to_string(state.m.size()) +
                         " moments for " + std::to_string(params.size()) + " parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.m[i].size() != params[i].numel() || state.v[i].size() != params[i].numel())
      throw DimensionError("adam_step: moment shape mismatch for parameter " + std::to_string(i));
    if (!params[i].has_grad())
      throw UninitializedGradientError("adam_step: parameter " + std::to_string(i) +
                                       " has no gradient");
  }

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double b1 = state.beta1, b2 = state.beta2;
  const double correction1 = 1.0 - std::pow(b1, t);
  const double correction2 = 1.0 - std::pow(b2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i].data();
    auto g = params[i].mutable_grad();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double gk = g[k];
      const double mk = b1 * m[k] + (1.0 - b1) * gk;
      const double vk = b2 * v[k] + (1.0 - b2) * gk * gk;
      m[k] = static_cast<Real>(mk);
      v[k] = static_cast<Real>(vk);
      const double m_hat = mk / correction1;
      const double v_hat = vk / correction2;
      w[k] = static_cast<Real>(w[k] - lr * m_hat / (std::sqrt(v_hat) + state.epsilon));
      g[k] = Real(0);
    }
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step(std::vector<Tensor<float>>&, AdamState<float>&, double);
template void adam_step(std::vector<Tensor<double>>&, AdamState<double>&, double);

}  // namespace arn
