// tests/support/gradcheck.hpp

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

// Central finite-difference oracle for reverse-mode gradients.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "arn/tensor.hpp"

namespace arn::testing {

struct GradCheckResult {
  double max_rel_error = 0;
  double max_abs_error = 0;
  std::string worst;  // "<tensor index>[<entry>]"
  std::size_t checked = 0;
};

// Errors below this magnitude are measured against it instead of the
// gradient itself, so entries whose true derivative is ~0 do not blow up the
// ratio with pure round-off.
inline constexpr double kRelErrorFloor = 1e-6;

inline double rel_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kRelErrorFloor});
  return std::abs(analytic - numeric) / denom;
}

/// Compares d(loss)/d(input) from backward() with a five-point central
/// difference (truncation error O(h^4)) of `loss_fn` for every entry of every
/// tensor in `inputs`. `loss_fn` must rebuild the graph from the current
/// values on every call.
inline GradCheckResult check_gradients(std::vector<Tensor<double>> inputs,
                                       const std::function<Tensor<double>()>& loss_fn,
                                       double h = 1e-4) {
  for (auto& t : inputs) {
    t.set_requires_grad(true);
    t.clear_grad();
  }
  backward(loss_fn());
  std::vector<std::vector<double>> analytic;
  for (auto& t : inputs) {
    if (t.has_grad())
      analytic.emplace_back(t.grad().begin(), t.grad().end());
    else
      analytic.emplace_back(t.numel(), 0.0);
  }

  GradCheckResult result;
  NoGradGuard no_grad;
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    auto values = inputs[p].data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      auto at = [&](double offset) {
        values[i] = saved + offset;
        return loss_fn().item();
      };
      const double numeric = (8 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12 * h);
      values[i] = saved;
      const double err = rel_error(analytic[p][i], numeric);
      result.max_abs_error = std::max(result.max_abs_error, std::abs(analytic[p][i] - numeric));
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst = std::to_string(p) + "[" + std::to_string(i) + "]";
      }
      ++result.checked;
    }
  }
  return result;
}

inline Tensor<double> random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0,
                                    double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

}  // namespace arn::testing
