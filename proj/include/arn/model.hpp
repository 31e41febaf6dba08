// arn/model.hpp

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

// Attentive recurrent network for time-domain speech enhancement.
//
// A block maps a [T x N] sequence to [T x N]:
//
//   y0 = LN0(x);  y1 = RNN(y0)
//   Q  = LN1(y1); KV = LN2(y1)
//   a  = Attention(Q, KV, KV) + Q
//   out = FeedForward(LN3(a)) + LN4(a)
//
// The network frames the waveform, projects each frame to N, runs the blocks,
// projects back to the output frame size and overlap-adds.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arn/dsp.hpp"
#include "arn/ops.hpp"
#include "arn/tensor.hpp"

namespace arn {

struct ArnConfig {
  std::size_t hidden = 1024;       // N
  std::size_t input_frame = 512;   // samples per input frame
  std::size_t output_frame = 256;  // samples per output frame
  std::size_t shift = 32;          // frame hop in samples
  std::size_t num_blocks = 4;
  bool causal = true;
  double dropout = 0.05;
  double layer_norm_eps = 1e-5;

  /// 32 ms input, 16 ms output, 2 ms hop, unidirectional LSTM, masked attention.
  static ArnConfig causal_default();
  /// 16 ms frames, BLSTM with N/2 units per direction.
  static ArnConfig noncausal_default();

  /// Throws ConfigurationError on inconsistent settings.
  void validate() const;

  /// Past samples visible to an input frame beyond its output span. The
  /// output frame is the trailing output_frame samples of the input span.
  std::size_t lookback() const { return input_frame - output_frame; }
  std::size_t rnn_units() const { return causal ? hidden : hidden / 2; }

  bool operator==(const ArnConfig&) const = default;
};

template <typename Real>
struct Linear {
  Tensor<Real> weight;  // [in x out]
  Tensor<Real> bias;    // [out]
};

template <typename Real>
struct LayerNormParams {
  Tensor<Real> gamma;  // [N]
  Tensor<Real> beta;   // [N]
};

/// Gate blocks are packed along columns in the order i, f, g, o.
template <typename Real>
struct LstmWeights {
  Tensor<Real> w_x;   // [in x 4H]
  Tensor<Real> w_h;   // [H x 4H]
  Tensor<Real> bias;  // [4H]

  std::size_t units() const { return w_h.rows(); }
};

template <typename Real>
struct AttentionParams {
  Tensor<Real> q, k, v;  // [N] each
  Linear<Real> lin_q;
  Linear<Real> lin_v_sig;
  Linear<Real> lin_v_tanh;
  // sigmoid(lin_v_sig(v)) * tanh(lin_v_tanh(v)), frozen for evaluation.
  Tensor<Real> cached_v_gate;

  /// Differentiable gate from the current parameters.
  Tensor<Real> v_gate() const;
  void refresh_v_gate_cache();
};

template <typename Real>
struct BlockParams {
  std::array<LayerNormParams<Real>, 5> norms;
  LstmWeights<Real> rnn_fwd;
  LstmWeights<Real> rnn_bwd;  // undefined tensors in the causal variant
  AttentionParams<Real> attention;
  Linear<Real> feedforward;  // N -> 4N
};

template <typename Real>
struct ModelParams {
  Linear<Real> input_proj;
  std::vector<BlockParams<Real>> blocks;
  Linear<Real> output_proj;

  /// Random initialization: weights and biases uniform in +-1/sqrt(fan_in),
  /// LSTM with fan_in = units, layer norms at gamma = 1, beta = 0.
  static ModelParams init(const ArnConfig& cfg, std::uint64_t seed);
  /// Every weight, bias and attention vector zero; gamma = 1, beta = 0.
  static ModelParams zeros(const ArnConfig& cfg);

  /// Trainable tensors in a stable order with hierarchical names.
  std::vector<std::pair<std::string, Tensor<Real>>> named_parameters() const;
  std::vector<Tensor<Real>> parameters() const;
  /// Non-trainable state (the evaluation v-gates).
  std::vector<std::pair<std::string, Tensor<Real>>> named_buffers() const;
  std::size_t parameter_count() const;

  void refresh_v_gate_caches();
  ModelParams clone() const;
};

/// Closed-form trainable parameter count for a configuration.
std::size_t expected_parameter_count(const ArnConfig& cfg);

template <typename Real>
Tensor<Real> linear(const Tensor<Real>& x, const Linear<Real>& layer);

/// Per-row normalization with population variance.
template <typename Real>
Tensor<Real> layer_norm(const Tensor<Real>& x, const Tensor<Real>& gamma,
                        const Tensor<Real>& beta, double eps);

template <typename Real>
struct LstmState {
  Tensor<Real> h;  // [1 x H]
  Tensor<Real> c;  // [1 x H]
};

/// One LSTM update, built from primitive ops.
template <typename Real>
LstmState<Real> lstm_step(const Tensor<Real>& x_t, const Tensor<Real>& h_prev,
                          const Tensor<Real>& c_prev, const LstmWeights<Real>& w);

/// Runs the LSTM over the rows of x from zero state; returns all h_t [T x H].
/// The recurrence is a single fused node with hand-written backprop through time.
template <typename Real>
Tensor<Real> lstm_sequence(const Tensor<Real>& x, const LstmWeights<Real>& w);

/// [forward LSTM over x, backward LSTM over reversed x re-aligned to t].
/// Throws ConfigurationError under a causal configuration.
template <typename Real>
Tensor<Real> blstm_sequence(const Tensor<Real>& x, const LstmWeights<Real>& fwd,
                            const LstmWeights<Real>& bwd, const ArnConfig& cfg);

template <typename Real>
Tensor<Real> attention_block(const Tensor<Real>& queries, const Tensor<Real>& keys,
                             const Tensor<Real>& values, const AttentionParams<Real>& p,
                             bool causal, Mode mode);

/// Linear N->4N, GELU, dropout, then the four N-wide chunks summed.
template <typename Real>
Tensor<Real> feedforward_block(const Tensor<Real>& x, const Linear<Real>& ffn, double dropout_rate,
                               Mode mode, Rng& rng);

template <typename Real>
Tensor<Real> arn_block_forward(const Tensor<Real>& x, const BlockParams<Real>& block,
                               const ArnConfig& cfg, Mode mode, Rng& rng);

/// Input frames [T x input_frame] -> output frames [T x output_frame].
template <typename Real>
Tensor<Real> arn_forward_frames(const Tensor<Real>& frames, const ModelParams<Real>& params,
                                const ArnConfig& cfg, Mode mode, Rng& rng);

/// Waveform [M] -> enhanced waveform [M]. Differentiable w.r.t. params.
template <typename Real>
Tensor<Real> arn_forward(const Tensor<Real>& x, const ModelParams<Real>& params,
                         const ArnConfig& cfg, Mode mode, Rng& rng);

/// A configuration paired with its parameters.
template <typename Real>
struct Model {
  ArnConfig config;
  ModelParams<Real> params;

  /// Evaluation-mode forward without graph recording.
  std::vector<Real> enhance(std::span<const Real> noisy) const;
};

}  // namespace arn
