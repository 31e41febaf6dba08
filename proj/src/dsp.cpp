// src/dsp.cpp

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

#include "arn/dsp.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "arn/error.hpp"
#include "arn/ops.hpp"

namespace arn {

std::size_t num_frames(std::size_t num_samples, std::size_t shift) {
  return (num_samples + shift - 1) / shift;
}

namespace {

void check_framing(std::size_t frame_len, std::size_t shift, std::size_t num_samples) {
  if (shift == 0 || frame_len == 0)
    throw ParameterError("frame length and shift must be positive");
  if (shift > frame_len)
    throw ParameterError("frame shift " + std::to_string(shift) + " exceeds frame length " +
                         std::to_string(frame_len));
  if (num_samples == 0) throw ParameterError("cannot frame an empty signal");
}

// Source index of (t, k), or -1 when it falls in the zero padding.
inline long long source_index(std::size_t t, std::size_t k, std::size_t shift,
                              std::size_t lookback, std::size_t len) {
  const long long idx = static_cast<long long>(t * shift + k) - static_cast<long long>(lookback);
  return (idx < 0 || idx >= static_cast<long long>(len)) ? -1 : idx;
}

// Gathers hop-spaced frames of `x` into [T x frame_len]; differentiable.
template <typename Real>
Tensor<Real> gather_frames(const Tensor<Real>& x, std::size_t frame_len, std::size_t shift,
                           std::size_t lookback, std::size_t count) {
  const std::size_t len = x.numel();
  std::vector<Real> out(count * frame_len, Real(0));
  for (std::size_t t = 0; t < count; ++t)
    for (std::size_t k = 0; k < frame_len; ++k) {
      const auto idx = source_index(t, k, shift, lookback, len);
      if (idx >= 0) out[t * frame_len + k] = x[static_cast<std::size_t>(idx)];
    }
  return record<Real>(Shape{count, frame_len}, std::move(out), {x}, "frame",
                      [x, frame_len, shift, lookback, count, len](std::span<const Real> g) mutable {
                        auto gx = x.mutable_grad();
                        for (std::size_t t = 0; t < count; ++t)
                          for (std::size_t k = 0; k < frame_len; ++k) {
                            const auto idx = source_index(t, k, shift, lookback, len);
                            if (idx >= 0) gx[static_cast<std::size_t>(idx)] += g[t * frame_len + k];
                          }
                      });
}

struct DftBasis {
  std::vector<double> cos_part;  // [win_len x F]
  std::vector<double> sin_part;  // [win_len x F], already negated
};

// cos/sin of 2*pi*idx/n with exact values on the quarter points, so the DC
// and Nyquist imaginary parts are identically zero.
std::pair<double, double> unit_root(std::size_t idx, std::size_t n) {
  if (n % 4 == 0) {
    if (idx == 0) return {1.0, 0.0};
    if (idx == n / 4) return {0.0, 1.0};
    if (idx == n / 2) return {-1.0, 0.0};
    if (idx == 3 * n / 4) return {0.0, -1.0};
  } else if (n % 2 == 0) {
    if (idx == 0) return {1.0, 0.0};
    if (idx == n / 2) return {-1.0, 0.0};
  } else if (idx == 0) {
    return {1.0, 0.0};
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(idx) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

const DftBasis& dft_basis(const StftConfig& cfg) {
  static std::mutex mu;
  static std::map<std::tuple<std::size_t, std::size_t, int>, DftBasis> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_tuple(cfg.fft_size, cfg.win_len, static_cast<int>(cfg.window));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const std::size_t n = cfg.fft_size, f_bins = cfg.num_bins();
  const auto window = analysis_window(cfg);
  DftBasis basis;
  basis.cos_part.resize(cfg.win_len * f_bins);
  basis.sin_part.resize(cfg.win_len * f_bins);
  for (std::size_t k = 0; k < cfg.win_len; ++k)
    for (std::size_t f = 0; f < f_bins; ++f) {
      const auto [c, s] = unit_root((k * f) % n, n);
      basis.cos_part[k * f_bins + f] = window[k] * c;
      basis.sin_part[k * f_bins + f] = -window[k] * s;
    }
  return cache.emplace(key, std::move(basis)).first->second;
}

template <typename Real>
Tensor<Real> constant_matrix(const std::vector<double>& values, std::size_t r, std::size_t c) {
  return Tensor<Real>(Shape{r, c}, std::vector<Real>(values.begin(), values.end()));
}

}  // namespace

template <typename Real>
FrameMatrix<Real> frame_signal(const Tensor<Real>& x, std::size_t frame_len, std::size_t shift,
                               std::size_t lookback) {
  check_framing(frame_len, shift, x.defined() ? x.numel() : 0);
  const std::size_t m = x.numel();
  FrameMatrix<Real> fm;
  fm.frames = gather_frames(x, frame_len, shift, lookback, num_frames(m, shift));
  fm.frame_len = frame_len;
  fm.shift = shift;
  fm.original_len = m;
  fm.lookback = lookback;
  return fm;
}

template <typename Real>
FrameMatrix<Real> frame_signal(std::span<const Real> x, std::size_t frame_len, std::size_t shift,
                               std::size_t lookback) {
  if (x.empty()) throw ParameterError("cannot frame an empty signal");
  return frame_signal(Tensor<Real>(Shape{x.size()}, std::vector<Real>(x.begin(), x.end())),
                      frame_len, shift, lookback);
}

template <typename Real>
Tensor<Real> overlap_add(const Tensor<Real>& frames, std::size_t shift, std::size_t original_len) {
  const std::size_t count = frames.rows(), len = frames.cols();
  check_framing(len, shift, original_len);
  if (count < num_frames(original_len, shift))
    throw DimensionError("overlap_add: " + std::to_string(count) + " frames cannot cover " +
                         std::to_string(original_len) + " samples");
  std::vector<Real> coverage(original_len, Real(0));
  std::vector<Real> out(original_len, Real(0));
  for (std::size_t t = 0; t < count; ++t)
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t n = t * shift + k;
      if (n >= original_len) break;
      out[n] += frames[t * len + k];
      coverage[n] += Real(1);
    }
  for (std::size_t n = 0; n < original_len; ++n) out[n] /= coverage[n];
  return record<Real>(
      Shape{original_len}, std::move(out), {frames}, "overlap_add",
      [frames, shift, count, len, original_len, coverage = std::move(coverage)](
          std::span<const Real> g) mutable {
        auto gf = frames.mutable_grad();
        for (std::size_t t = 0; t < count; ++t)
          for (std::size_t k = 0; k < len; ++k) {
            const std::size_t n = t * shift + k;
            if (n >= original_len) break;
            gf[t * len + k] += g[n] / coverage[n];
          }
      });
}

template <typename Real>
Tensor<Real> overlap_add(const FrameMatrix<Real>& frames) {
  return overlap_add(frames.frames, frames.shift, frames.original_len);
}

std::vector<double> analysis_window(const StftConfig& cfg) {
  std::vector<double> w(cfg.win_len, 1.0);
  if (cfg.window == Window::Hann)
    for (std::size_t k = 0; k < cfg.win_len; ++k)
      w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                  static_cast<double>(cfg.win_len));
  return w;
}

template <typename Real>
SpectrogramParts<Real> stft_parts(const Tensor<Real>& s, const StftConfig& cfg) {
  if (!s.defined() || s.numel() == 0) throw ParameterError("stft of an empty signal");
  if (cfg.win_len == 0 || cfg.hop == 0 || cfg.win_len > cfg.fft_size)
    throw ParameterError("stft: need 0 < win_len <= fft_size and hop > 0");
  const std::size_t f_bins = cfg.num_bins();
  const auto& basis = dft_basis(cfg);
  const std::size_t count = num_frames(s.numel(), cfg.hop);
  // hop may exceed win_len here, so framing bypasses the frame_len >= shift check.
  auto frames = gather_frames(s, cfg.win_len, cfg.hop, 0, count);
  SpectrogramParts<Real> parts;
  parts.real = matmul(frames, constant_matrix<Real>(basis.cos_part, cfg.win_len, f_bins));
  parts.imag = matmul(frames, constant_matrix<Real>(basis.sin_part, cfg.win_len, f_bins));
  parts.config = cfg;
  return parts;
}

template <typename Real>
Real rms(std::span<const Real> x) {
  if (x.empty()) return Real(0);
  double acc = 0;
  for (Real v : x) acc += static_cast<double>(v) * v;
  return static_cast<Real>(std::sqrt(acc / static_cast<double>(x.size())));
}

template <typename Real>
Normalized<Real> rms_normalize(std::span<const Real> x, std::span<const Real> companion) {
  double acc = 0;
  for (Real v : x) acc += static_cast<double>(v) * v;
  if (x.empty() || acc == 0.0) throw DegenerateSignalError("rms_normalize: signal is silent");
  const double gain = 1.0 / std::sqrt(acc / static_cast<double>(x.size()));
  Normalized<Real> out;
  out.gain = static_cast<Real>(gain);
  out.signal.reserve(x.size());
  out.companion.reserve(companion.size());
  for (Real v : x) out.signal.push_back(static_cast<Real>(gain * v));
  for (Real v : companion) out.companion.push_back(static_cast<Real>(gain * v));
  return out;
}

#define ARN_INSTANTIATE_DSP(R)                                                                 \
  template struct FrameMatrix<R>;                                                              \
  template FrameMatrix<R> frame_signal(const Tensor<R>&, std::size_t, std::size_t, std::size_t); \
  template FrameMatrix<R> frame_signal(std::span<const R>, std::size_t, std::size_t,           \
                                       std::size_t);                                           \
  template Tensor<R> overlap_add(const Tensor<R>&, std::size_t, std::size_t);                  \
  template Tensor<R> overlap_add(const FrameMatrix<R>&);                                       \
  template SpectrogramParts<R> stft_parts(const Tensor<R>&, const StftConfig&);                \
  template R rms(std::span<const R>);                                                          \
  template Normalized<R> rms_normalize(std::span<const R>, std::span<const R>);

ARN_INSTANTIATE_DSP(float)
ARN_INSTANTIATE_DSP(double)

#undef ARN_INSTANTIATE_DSP

}  // namespace arn
