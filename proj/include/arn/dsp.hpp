// arn/dsp.hpp

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
#include <span>
#include <vector>

#include "arn/tensor.hpp"

namespace arn {

inline constexpr int kSampleRate = 16000;

/// Mono 16 kHz samples.
using AudioBuffer = std::vector<float>;

/// Number of frames covering `num_samples` at hop `shift`: ceil(M / J).
std::size_t num_frames(std::size_t num_samples, std::size_t shift);

/// Rectangular frames of a signal. Row t holds x[t*shift - lookback + k] for
/// k in [0, frame_len), zero outside [0, original_len). With lookback 0 this
/// is plain frame-level chunking; a positive lookback prepends past context.
template <typename Real>
struct FrameMatrix {
  Tensor<Real> frames;  // [T x frame_len]
  std::size_t frame_len = 0;
  std::size_t shift = 0;
  std::size_t original_len = 0;
  std::size_t lookback = 0;

  std::size_t num_frames() const { return frames.rows(); }
};

/// Differentiable w.r.t. `x` (shape [M]). Requires frame_len >= shift >= 1.
template <typename Real>
FrameMatrix<Real> frame_signal(const Tensor<Real>& x, std::size_t frame_len, std::size_t shift,
                               std::size_t lookback = 0);

template <typename Real>
FrameMatrix<Real> frame_signal(std::span<const Real> x, std::size_t frame_len, std::size_t shift,
                               std::size_t lookback = 0);

/// Places row t at offset t*shift (lookback is ignored, output frames are
/// never shifted), sums overlapping contributions and divides each sample by
/// the number of frames covering it. Result has shape [original_len].
template <typename Real>
Tensor<Real> overlap_add(const FrameMatrix<Real>& frames);

template <typename Real>
Tensor<Real> overlap_add(const Tensor<Real>& frames, std::size_t shift, std::size_t original_len);

enum class Window { Hann, Rectangular };

/// Analysis settings for the magnitude loss. Defaults: 32 ms periodic Hann
/// window, 16 ms hop, 512-point transform at 16 kHz.
struct StftConfig {
  std::size_t fft_size = 512;
  std::size_t win_len = 512;
  std::size_t hop = 256;
  Window window = Window::Hann;

  std::size_t num_bins() const { return fft_size / 2 + 1; }
};

template <typename Real>
struct SpectrogramParts {
  Tensor<Real> real;  // [T_f x F]
  Tensor<Real> imag;  // [T_f x F]
  StftConfig config;
};

std::vector<double> analysis_window(const StftConfig& cfg);

/// Windowed DFT of each hop-spaced frame (frames start at t*hop, zero padded
/// past the end, T_f = ceil(M / hop)). Linear in `s`, so gradients flow back
/// to the signal.
template <typename Real>
SpectrogramParts<Real> stft_parts(const Tensor<Real>& s, const StftConfig& cfg);

template <typename Real>
struct Normalized {
  std::vector<Real> signal;
  std::vector<Real> companion;
  Real gain = 1;
};

template <typename Real>
Real rms(std::span<const Real> x);

/// Scales `x` to unit RMS and applies the same gain to `companion`.
/// Throws DegenerateSignalError when `x` is silent.
template <typename Real>
Normalized<Real> rms_normalize(std::span<const Real> x, std::span<const Real> companion);

}  // namespace arn
