// src/losses.cpp

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

#include "arn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "arn/error.hpp"
#include "arn/ops.hpp"

namespace arn {

namespace {

template <typename Real>
void check_same_length(const Tensor<Real>& a, const Tensor<Real>& b, const char* what) {
  if (a.numel() != b.numel())
    throw DimensionError(std::string(what) + ": lengths " + std::to_string(a.numel()) + " and " +
                         std::to_string(b.numel()) + " differ");
}

double to_db(double signal_energy, double error_energy) {
  if (signal_energy <= 0.0) return -kMetricCapDb;
  if (error_energy <= 0.0) return kMetricCapDb;
  return std::clamp(10.0 * std::log10(signal_energy / error_energy), -kMetricCapDb, kMetricCapDb);
}

template <typename Real>
double snr_impl(std::span<const Real> clean, std::span<const Real> estimate) {
  if (clean.size() != estimate.size()) throw DimensionError("snr: length mismatch");
  double signal = 0, error = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double s = clean[i];
    const double e = s - static_cast<double>(estimate[i]);
    signal += s * s;
    error += e * e;
  }
  if (signal == 0.0) throw DegenerateSignalError("snr: reference signal is silent");
  return to_db(signal, error);
}

template <typename Real>
double si_snr_impl(std::span<const Real> clean, std::span<const Real> estimate) {
  if (clean.size() != estimate.size()) throw DimensionError("si_snr: length mismatch");
  const std::size_t m = clean.size();
  if (m == 0) throw DegenerateSignalError("si_snr: empty reference");
  double mean_s = 0, mean_e = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mean_s += clean[i];
    mean_e += estimate[i];
  }
  mean_s /= static_cast<double>(m);
  mean_e /= static_cast<double>(m);
  double dot = 0, ref_energy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double s = clean[i] - mean_s, e = estimate[i] - mean_e;
    dot += s * e;
    ref_energy += s * s;
  }
  if (ref_energy == 0.0) throw DegenerateSignalError("si_snr: reference signal is silent");
  const double alpha = dot / ref_energy;
  double target = 0, residual = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = alpha * (clean[i] - mean_s);
    const double r = (estimate[i] - mean_e) - t;
    target += t * t;
    residual += r * r;
  }
  return to_db(target, residual);
}

}  // namespace

LossKind parse_loss_kind(const std::string& name) {
  if (name == "mse" || name == "MSE") return LossKind::Mse;
  if (name == "pcm" || name == "PCM") return LossKind::Pcm;
  throw ParameterError("unknown loss '" + name + "' (expected mse or pcm)");
}

std::string to_string(LossKind kind) { return kind == LossKind::Mse ? "mse" : "pcm"; }

template <typename Real>
LossValue<Real> mse_loss(const Tensor<Real>& clean, const Tensor<Real>& estimate) {
  check_same_length(clean, estimate, "mse_loss");
  const auto diff = sub(reshape(clean, Shape{clean.numel()}), reshape(estimate, Shape{estimate.numel()}));
  return {mean(mul(diff, diff)), LossKind::Mse};
}

template <typename Real>
Tensor<Real> spectral_magnitude_loss(const Tensor<Real>& reference, const Tensor<Real>& estimate,
                                     const StftConfig& cfg) {
  check_same_length(reference, estimate, "spectral_magnitude_loss");
  const auto ref = stft_parts(reference, cfg);
  const auto est = stft_parts(estimate, cfg);
  const auto ref_mag = add(abs(ref.real), abs(ref.imag));
  const auto est_mag = add(abs(est.real), abs(est.imag));
  return mean(abs(sub(ref_mag, est_mag)));
}

template <typename Real>
LossValue<Real> pcm_loss(const Tensor<Real>& noisy, const Tensor<Real>& clean,
                         const Tensor<Real>& estimate, const StftConfig& cfg) {
  check_same_length(noisy, clean, "pcm_loss");
  check_same_length(clean, estimate, "pcm_loss");
  const auto flat = [](const Tensor<Real>& t) { return reshape(t, Shape{t.numel()}); };
  const auto x = flat(noisy), s = flat(clean), s_hat = flat(estimate);
  const auto noise = sub(x, s);
  const auto noise_hat = sub(x, s_hat);
  const auto speech_term = spectral_magnitude_loss(s, s_hat, cfg);
  const auto noise_term = spectral_magnitude_loss(noise, noise_hat, cfg);
  return {scale(add(speech_term, noise_term), Real(0.5)), LossKind::Pcm};
}

template <typename Real>
LossValue<Real> compute_loss(LossKind kind, const Tensor<Real>& noisy, const Tensor<Real>& clean,
                             const Tensor<Real>& estimate, const StftConfig& cfg) {
  return kind == LossKind::Mse ? mse_loss(clean, estimate) : pcm_loss(noisy, clean, estimate, cfg);
}

double snr_db(std::span<const float> clean, std::span<const float> estimate) {
  return snr_impl(clean, estimate);
}
double snr_db(std::span<const double> clean, std::span<const double> estimate) {
  return snr_impl(clean, estimate);
}
double si_snr_db(std::span<const float> clean, std::span<const float> estimate) {
  return si_snr_impl(clean, estimate);
}
double si_snr_db(std::span<const double> clean, std::span<const double> estimate) {
  return si_snr_impl(clean, estimate);
}

#define ARN_INSTANTIATE_LOSSES(R)                                                              \
  template LossValue<R> mse_loss(const Tensor<R>&, const Tensor<R>&);                          \
  template Tensor<R> spectral_magnitude_loss(const Tensor<R>&, const Tensor<R>&,               \
                                             const StftConfig&);                               \
  template LossValue<R> pcm_loss(const Tensor<R>&, const Tensor<R>&, const Tensor<R>&,         \
                                 const StftConfig&);                                           \
  template LossValue<R> compute_loss(LossKind, const Tensor<R>&, const Tensor<R>&,             \
                                     const Tensor<R>&, const StftConfig&);

ARN_INSTANTIATE_LOSSES(float)
ARN_INSTANTIATE_LOSSES(double)

#undef ARN_INSTANTIATE_LOSSES

}  // namespace arn
