// arn/optim.hpp

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

#include <cstdint>
#include <vector>

#include "arn/tensor.hpp"

namespace arn {

/// First/second moment estimates, one array per parameter in parameter order.
template <typename Real>
struct AdamState {
  std::vector<std::vector<Real>> m;
  std::vector<std::vector<Real>> v;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Zero moments shaped after `params`.
  static AdamState for_params(const std::vector<Tensor<Real>>& params);
};

/// One bias-corrected Adam update of every tensor in `params`, then zeroes
/// their gradients. Throws UninitializedGradientError if any parameter has no
/// gradient buffer and DimensionError if the state does not mirror `params`.
template <typename Real>
void adam_step(std::vector<Tensor<Real>>& params, AdamState<Real>& state, double lr);

}  // namespace arn
