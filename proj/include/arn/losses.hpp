// arn/losses.hpp

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

#include <span>
#include <string>

#include "arn/dsp.hpp"
#include "arn/tensor.hpp"

namespace arn {

enum class LossKind { Mse, Pcm };

LossKind parse_loss_kind(const std::string& name);
std::string to_string(LossKind kind);

template <typename Real>
struct LossValue {
  Tensor<Real> value;  // scalar, differentiable
  LossKind kind;
};

/// Mean squared sample error over the utterance.
template <typename Real>
LossValue<Real> mse_loss(const Tensor<Real>& clean, const Tensor<Real>& estimate);

/// Mean absolute difference of |Re| + |Im| spectra between two signals.
template <typename Real>
Tensor<Real> spectral_magnitude_loss(const Tensor<Real>& reference, const Tensor<Real>& estimate,
                                     const StftConfig& cfg);

/// Half speech term, half implied-noise term with noise estimate = noisy - estimate.
template <typename Real>
LossValue<Real> pcm_loss(const Tensor<Real>& noisy, const Tensor<Real>& clean,
                         const Tensor<Real>& estimate, const StftConfig& cfg = {});

template <typename Real>
LossValue<Real> compute_loss(LossKind kind, const Tensor<Real>& noisy, const Tensor<Real>& clean,
                             const Tensor<Real>& estimate, const StftConfig& cfg = {});

/// Metric ceiling when the error is numerically zero.
inline constexpr double kMetricCapDb = 100.0;

/// 10 log10(|s|^2 / |s - est|^2), capped. Throws on silent reference.
double snr_db(std::span<const float> clean, std::span<const float> estimate);
double snr_db(std::span<const double> clean, std::span<const double> estimate);

/// Scale-invariant SNR on zero-mean copies of both signals, capped.
double si_snr_db(std::span<const float> clean, std::span<const float> estimate);
double si_snr_db(std::span<const double> clean, std::span<const double> estimate);

}  // namespace arn
