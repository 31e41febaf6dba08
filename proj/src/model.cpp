// src/model.cpp

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

#include "arn/model.hpp"

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "arn/error.hpp"

namespace arn {

namespace {

template <typename Real>
using RowMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Real>
using RowVec = Eigen::Matrix<Real, 1, Eigen::Dynamic>;
template <typename Real>
using MapC = Eigen::Map<const RowMat<Real>>;
template <typename Real>
using Map = Eigen::Map<RowMat<Real>>;

template <typename Real>
Real sigm(Real x) {
  return Real(1) / (Real(1) + std::exp(-x));
}

template <typename Real>
Tensor<Real> uniform(Shape shape, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor<Real> t(std::move(shape), Real(0), true);
  for (auto& v : t.data()) v = static_cast<Real>(dist(rng));
  return t;
}

template <typename Real>
Tensor<Real> filled(Shape shape, Real value) {
  return Tensor<Real>(std::move(shape), value, true);
}

template <typename Real>
Linear<Real> make_linear(std::size_t in, std::size_t out, std::mt19937_64* rng) {
  if (!rng) return {filled<Real>({in, out}, 0), filled<Real>({out}, 0)};
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  auto w = uniform<Real>({in, out}, bound, *rng);
  auto b = uniform<Real>({out}, bound, *rng);
  return {w, b};
}

template <typename Real>
LstmWeights<Real> make_lstm(std::size_t in, std::size_t units, std::mt19937_64* rng) {
  if (!rng)
    return {filled<Real>({in, 4 * units}, 0), filled<Real>({units, 4 * units}, 0),
            filled<Real>({4 * units}, 0)};
  const double bound = 1.0 / std::sqrt(static_cast<double>(units));
  auto wx = uniform<Real>({in, 4 * units}, bound, *rng);
  auto wh = uniform<Real>({units, 4 * units}, bound, *rng);
  auto b = uniform<Real>({4 * units}, bound, *rng);
  return {wx, wh, b};
}

template <typename Real>
ModelParams<Real> build(const ArnConfig& cfg, std::mt19937_64* rng) {
  cfg.validate();
  const std::size_t n = cfg.hidden;
  ModelParams<Real> p;
  p.input_proj = make_linear<Real>(cfg.input_frame, n, rng);
  for (std::size_t b = 0; b < cfg.num_blocks; ++b) {
    BlockParams<Real> block;
    for (auto& norm : block.norms) {
      norm.gamma = filled<Real>({n}, 1);
      norm.beta = filled<Real>({n}, 0);
    }
    block.rnn_fwd = make_lstm<Real>(n, cfg.rnn_units(), rng);
    if (!cfg.causal) block.rnn_bwd = make_lstm<Real>(n, cfg.rnn_units(), rng);
    auto& a = block.attention;
    const double bound = 1.0 / std::sqrt(static_cast<double>(n));
    if (rng) {
      a.q = uniform<Real>({n}, bound, *rng);
      a.k = uniform<Real>({n}, bound, *rng);
      a.v = uniform<Real>({n}, bound, *rng);
    } else {
      a.q = filled<Real>({n}, 0);
      a.k = filled<Real>({n}, 0);
      a.v = filled<Real>({n}, 0);
    }
    a.lin_q = make_linear<Real>(n, n, rng);
    a.lin_v_sig = make_linear<Real>(n, n, rng);
    a.lin_v_tanh = make_linear<Real>(n, n, rng);
    block.feedforward = make_linear<Real>(n, 4 * n, rng);
    p.blocks.push_back(std::move(block));
  }
  p.output_proj = make_linear<Real>(n, cfg.output_frame, rng);
  p.refresh_v_gate_caches();
  return p;
}

template <typename Real>
void add_linear(std::vector<std::pair<std::string, Tensor<Real>>>& out, const std::string& prefix,
                const Linear<Real>& l) {
  out.emplace_back(prefix + ".weight", l.weight);
  out.emplace_back(prefix + ".bias", l.bias);
}

template <typename Real>
void add_lstm(std::vector<std::pair<std::string, Tensor<Real>>>& out, const std::string& prefix,
              const LstmWeights<Real>& w) {
  if (!w.w_x.defined()) return;
  out.emplace_back(prefix + ".w_x", w.w_x);
  out.emplace_back(prefix + ".w_h", w.w_h);
  out.emplace_back(prefix + ".bias", w.bias);
}

template <typename Real>
Linear<Real> clone_linear(const Linear<Real>& l) {
  auto w = l.weight.clone();
  auto b = l.bias.clone();
  w.set_requires_grad(true);
  b.set_requires_grad(true);
  return {w, b};
}

template <typename Real>
Tensor<Real> clone_param(const Tensor<Real>& t) {
  if (!t.defined()) return t;
  auto c = t.clone();
  c.set_requires_grad(true);
  return c;
}

// LSTM recurrence over precomputed input contributions gates_x [T x 4H]
// (x_t W_x + b). A single graph node; backward is backprop through time.
template <typename Real>
Tensor<Real> lstm_recurrence(const Tensor<Real>& gates_x, const Tensor<Real>& w_h) {
  const std::size_t steps = gates_x.rows(), units = w_h.rows(), width = 4 * units;
  if (gates_x.cols() != width || w_h.cols() != width)
    throw DimensionError("lstm: gate width mismatch");

  std::vector<Real> acts(steps * width), cells(steps * units), tanh_cells(steps * units),
      hidden(steps * units);
  MapC<Real> wh(w_h.data().data(), units, width);
  RowVec<Real> h = RowVec<Real>::Zero(units);
  RowVec<Real> z(width);
  for (std::size_t t = 0; t < steps; ++t) {
    z.noalias() = h * wh;
    const Real* gx = gates_x.data().data() + t * width;
    Real* a = acts.data() + t * width;
    for (std::size_t j = 0; j < width; ++j) {
      const Real pre = z[j] + gx[j];
      a[j] = (j >= 2 * units && j < 3 * units) ? std::tanh(pre) : sigm(pre);
    }
    for (std::size_t j = 0; j < units; ++j) {
      const Real c_prev = t ? cells[(t - 1) * units + j] : Real(0);
      const Real c = a[units + j] * c_prev + a[j] * a[2 * units + j];
      const Real tc = std::tanh(c);
      cells[t * units + j] = c;
      tanh_cells[t * units + j] = tc;
      hidden[t * units + j] = a[3 * units + j] * tc;
      h[j] = hidden[t * units + j];
    }
  }

  std::vector<Real> h_saved = hidden;
  return record<Real>(
      Shape{steps, units}, std::move(hidden), {gates_x, w_h}, "lstm",
      [gates_x, w_h, steps, units, width, acts = std::move(acts), cells = std::move(cells),
       tanh_cells = std::move(tanh_cells),
       h_saved = std::move(h_saved)](std::span<const Real> g) mutable {
        MapC<Real> wh(w_h.data().data(), units, width);
        RowMat<Real> dz(steps, width);
        RowVec<Real> dh_next = RowVec<Real>::Zero(units);
        std::vector<Real> dc_next(units, Real(0));
        for (std::size_t s = steps; s-- > 0;) {
          const Real* a = acts.data() + s * width;
          for (std::size_t j = 0; j < units; ++j) {
            const Real i = a[j], f = a[units + j], gg = a[2 * units + j], o = a[3 * units + j];
            const Real tc = tanh_cells[s * units + j];
            const Real c_prev = s ? cells[(s - 1) * units + j] : Real(0);
            const Real dh = g[s * units + j] + dh_next[j];
            const Real d_o = dh * tc;
            const Real dc = dh * o * (Real(1) - tc * tc) + dc_next[j];
            dc_next[j] = dc * f;
            dz(s, j) = dc * gg * i * (Real(1) - i);
            dz(s, units + j) = dc * c_prev * f * (Real(1) - f);
            dz(s, 2 * units + j) = dc * i * (Real(1) - gg * gg);
            dz(s, 3 * units + j) = d_o * o * (Real(1) - o);
          }
          dh_next.noalias() = dz.row(s) * wh.transpose();
        }
        if (gates_x.requires_grad()) Map<Real>(gates_x.mutable_grad().data(), steps, width) += dz;
        if (w_h.requires_grad() && steps > 1) {
          // h_{t-1} for t >= 1; the t = 0 term multiplies the zero initial state.
          MapC<Real> h_prev(h_saved.data(), steps - 1, units);
          Map<Real>(w_h.mutable_grad().data(), units, width).noalias() +=
              h_prev.transpose() * dz.bottomRows(steps - 1);
        }
      });
}

template <typename Real>
Tensor<Real> as_row(const Tensor<Real>& v) {
  return reshape(v, Shape{1, v.numel()});
}

}  // namespace

ArnConfig ArnConfig::causal_default() { return ArnConfig{}; }

ArnConfig ArnConfig::noncausal_default() {
  ArnConfig cfg;
  cfg.input_frame = 256;
  cfg.output_frame = 256;
  cfg.causal = false;
  return cfg;
}

void ArnConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigurationError("ArnConfig: " + msg); };
  if (hidden == 0) fail("hidden width must be positive");
  if (num_blocks == 0) fail("need at least one block");
  if (shift == 0 || output_frame == 0 || input_frame == 0) fail("frame sizes must be positive");
  if (shift > output_frame) fail("shift exceeds output frame");
  if (output_frame > input_frame) fail("output frame longer than input frame");
  if (!causal && hidden % 2 != 0) fail("bidirectional variant needs an even hidden width");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (!(layer_norm_eps >= 0.0)) fail("layer-norm epsilon must be nonnegative");
}

std::size_t expected_parameter_count(const ArnConfig& cfg) {
  const std::size_t n = cfg.hidden, h = cfg.rnn_units();
  const std::size_t directions = cfg.causal ? 1 : 2;
  const std::size_t rnn = directions * 4 * h * (n + h + 1);
  const std::size_t norms = 5 * 2 * n;
  const std::size_t attention = 3 * n + 3 * (n * n + n);
  const std::size_t feedforward = n * 4 * n + 4 * n;
  const std::size_t per_block = norms + rnn + attention + feedforward;
  return (cfg.input_frame * n + n) + cfg.num_blocks * per_block +
         (n * cfg.output_frame + cfg.output_frame);
}

template <typename Real>
Tensor<Real> AttentionParams<Real>::v_gate() const {
  const auto row = as_row(v);
  auto gate = mul(sigmoid(linear(row, lin_v_sig)), tanh(linear(row, lin_v_tanh)));
  return reshape(gate, Shape{v.numel()});
}

template <typename Real>
void AttentionParams<Real>::refresh_v_gate_cache() {
  NoGradGuard guard;
  cached_v_gate = v_gate().detach();
}

template <typename Real>
ModelParams<Real> ModelParams<Real>::init(const ArnConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return build<Real>(cfg, &rng);
}

template <typename Real>
ModelParams<Real> ModelParams<Real>::zeros(const ArnConfig& cfg) {
  return build<Real>(cfg, nullptr);
}

template <typename Real>
std::vector<std::pair<std::string, Tensor<Real>>> ModelParams<Real>::named_parameters() const {
  std::vector<std::pair<std::string, Tensor<Real>>> out;
  add_linear(out, "input_proj", input_proj);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    const std::string prefix = "blocks." + std::to_string(b);
    for (std::size_t i = 0; i < blk.norms.size(); ++i) {
      const std::string ln = prefix + ".norm" + std::to_string(i);
      out.emplace_back(ln + ".gamma", blk.norms[i].gamma);
      out.emplace_back(ln + ".beta", blk.norms[i].beta);
    }
    add_lstm(out, prefix + ".rnn_fwd", blk.rnn_fwd);
    add_lstm(out, prefix + ".rnn_bwd", blk.rnn_bwd);
    const auto& a = blk.attention;
    out.emplace_back(prefix + ".attention.q", a.q);
    out.emplace_back(prefix + ".attention.k", a.k);
    out.emplace_back(prefix + ".attention.v", a.v);
    add_linear(out, prefix + ".attention.lin_q", a.lin_q);
    add_linear(out, prefix + ".attention.lin_v_sig", a.lin_v_sig);
    add_linear(out, prefix + ".attention.lin_v_tanh", a.lin_v_tanh);
    add_linear(out, prefix + ".feedforward", blk.feedforward);
  }
  add_linear(out, "output_proj", output_proj);
  return out;
}

template <typename Real>
std::vector<Tensor<Real>> ModelParams<Real>::parameters() const {
  std::vector<Tensor<Real>> out;
  for (auto& [name, t] : named_parameters()) out.push_back(t);
  return out;
}

template <typename Real>
std::vector<std::pair<std::string, Tensor<Real>>> ModelParams<Real>::named_buffers() const {
  std::vector<std::pair<std::string, Tensor<Real>>> out;
  for (std::size_t b = 0; b < blocks.size(); ++b)
    out.emplace_back("blocks." + std::to_string(b) + ".attention.v_gate_cache",
                     blocks[b].attention.cached_v_gate);
  return out;
}

template <typename Real>
std::size_t ModelParams<Real>::parameter_count() const {
  std::size_t total = 0;
  for (auto& [name, t] : named_parameters()) total += t.numel();
  return total;
}

template <typename Real>
void ModelParams<Real>::refresh_v_gate_caches() {
  for (auto& b : blocks) b.attention.refresh_v_gate_cache();
}

template <typename Real>
ModelParams<Real> ModelParams<Real>::clone() const {
  ModelParams out;
  out.input_proj = clone_linear(input_proj);
  out.output_proj = clone_linear(output_proj);
  for (const auto& b : blocks) {
    BlockParams<Real> c;
    for (std::size_t i = 0; i < b.norms.size(); ++i)
      c.norms[i] = {clone_param(b.norms[i].gamma), clone_param(b.norms[i].beta)};
    c.rnn_fwd = {clone_param(b.rnn_fwd.w_x), clone_param(b.rnn_fwd.w_h),
                 clone_param(b.rnn_fwd.bias)};
    c.rnn_bwd = {clone_param(b.rnn_bwd.w_x), clone_param(b.rnn_bwd.w_h),
                 clone_param(b.rnn_bwd.bias)};
    const auto& a = b.attention;
    c.attention.q = clone_param(a.q);
    c.attention.k = clone_param(a.k);
    c.attention.v = clone_param(a.v);
    c.attention.lin_q = clone_linear(a.lin_q);
    c.attention.lin_v_sig = clone_linear(a.lin_v_sig);
    c.attention.lin_v_tanh = clone_linear(a.lin_v_tanh);
    if (a.cached_v_gate.defined()) c.attention.cached_v_gate = a.cached_v_gate.clone();
    c.feedforward = clone_linear(b.feedforward);
    out.blocks.push_back(std::move(c));
  }
  return out;
}

template <typename Real>
Tensor<Real> linear(const Tensor<Real>& x, const Linear<Real>& layer) {
  return add(matmul(x, layer.weight), layer.bias);
}

template <typename Real>
Tensor<Real> layer_norm(const Tensor<Real>& x, const Tensor<Real>& gamma,
                        const Tensor<Real>& beta, double eps) {
  const std::size_t rows = x.rows(), n = x.cols();
  if (gamma.numel() != n || beta.numel() != n)
    throw DimensionError("layer_norm: gain/bias length differs from row width");
  std::vector<Real> out(rows * n), xhat(rows * n), inv_std(rows);
  const Real inv_n = Real(1) / static_cast<Real>(n);
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* xr = x.data().data() + r * n;
    Real mu = 0;
    for (std::size_t j = 0; j < n; ++j) mu += xr[j];
    mu *= inv_n;
    Real var = 0;
    for (std::size_t j = 0; j < n; ++j) var += (xr[j] - mu) * (xr[j] - mu);
    var *= inv_n;
    const Real is = Real(1) / std::sqrt(var + static_cast<Real>(eps));
    inv_std[r] = is;
    for (std::size_t j = 0; j < n; ++j) {
      xhat[r * n + j] = (xr[j] - mu) * is;
      out[r * n + j] = xhat[r * n + j] * gamma[j] + beta[j];
    }
  }
  return record<Real>(
      x.shape(), std::move(out), {x, gamma, beta}, "layer_norm",
      [x, gamma, beta, rows, n, inv_n, xhat = std::move(xhat),
       inv_std = std::move(inv_std)](std::span<const Real> g) mutable {
        if (gamma.requires_grad()) {
          auto gg = gamma.mutable_grad();
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < n; ++j) gg[j] += g[r * n + j] * xhat[r * n + j];
        }
        if (beta.requires_grad()) {
          auto gb = beta.mutable_grad();
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < n; ++j) gb[j] += g[r * n + j];
        }
        if (x.requires_grad()) {
          auto gx = x.mutable_grad();
          for (std::size_t r = 0; r < rows; ++r) {
            Real sum_gh = 0, sum_ghx = 0;
            for (std::size_t j = 0; j < n; ++j) {
              const Real gh = g[r * n + j] * gamma[j];
              sum_gh += gh;
              sum_ghx += gh * xhat[r * n + j];
            }
            for (std::size_t j = 0; j < n; ++j) {
              const Real gh = g[r * n + j] * gamma[j];
              gx[r * n + j] +=
                  inv_std[r] * (gh - inv_n * sum_gh - xhat[r * n + j] * inv_n * sum_ghx);
            }
          }
        }
      });
}

template <typename Real>
LstmState<Real> lstm_step(const Tensor<Real>& x_t, const Tensor<Real>& h_prev,
                          const Tensor<Real>& c_prev, const LstmWeights<Real>& w) {
  const std::size_t units = w.units();
  const auto z = add(add(matmul(x_t, w.w_x), matmul(h_prev, w.w_h)), w.bias);
  const auto i = sigmoid(slice_cols(z, 0, units));
  const auto f = sigmoid(slice_cols(z, units, units));
  const auto g = tanh(slice_cols(z, 2 * units, units));
  const auto o = sigmoid(slice_cols(z, 3 * units, units));
  auto c = add(mul(f, c_prev), mul(i, g));
  auto h = mul(o, tanh(c));
  return {h, c};
}

template <typename Real>
Tensor<Real> lstm_sequence(const Tensor<Real>& x, const LstmWeights<Real>& w) {
  if (x.cols() != w.w_x.rows())
    throw DimensionError("lstm: input width " + std::to_string(x.cols()) + " vs weights " +
                         shape_str(w.w_x.shape()));
  return lstm_recurrence(linear(x, Linear<Real>{w.w_x, w.bias}), w.w_h);
}

template <typename Real>
Tensor<Real> blstm_sequence(const Tensor<Real>& x, const LstmWeights<Real>& fwd,
                            const LstmWeights<Real>& bwd, const ArnConfig& cfg) {
  if (cfg.causal) throw ConfigurationError("bidirectional LSTM requested under a causal config");
  auto forward = lstm_sequence(x, fwd);
  auto backward = reverse_rows(lstm_sequence(reverse_rows(x), bwd));
  return concat_cols(forward, backward);
}

template <typename Real>
Tensor<Real> attention_block(const Tensor<Real>& queries, const Tensor<Real>& keys,
                             const Tensor<Real>& values, const AttentionParams<Real>& p,
                             bool causal, Mode mode) {
  if (!queries.defined() || !keys.defined() || !values.defined())
    throw EmptySequenceError("attention over an empty sequence");
  const std::size_t n = queries.cols();
  if (keys.shape() != queries.shape() || values.shape() != queries.shape() ||
      queries.rank() != 2 || p.q.numel() != n)
    throw DimensionError("attention: Q, K, V must all be [T x N]");

  const auto k_gated = mul(keys, sigmoid(p.k));
  const auto q_gated = mul(linear(queries, p.lin_q), sigmoid(p.q));
  const bool use_cache = mode == Mode::Eval && p.cached_v_gate.defined();
  const auto v_gated = mul(values, use_cache ? p.cached_v_gate : p.v_gate());

  auto scores = scale(matmul(q_gated, transpose(k_gated)),
                      Real(1) / std::sqrt(static_cast<Real>(n)));
  if (causal) scores = causal_mask(scores);
  return matmul(softmax_rows(scores), v_gated);
}

template <typename Real>
Tensor<Real> feedforward_block(const Tensor<Real>& x, const Linear<Real>& ffn, double dropout_rate,
                               Mode mode, Rng& rng) {
  const std::size_t n = x.cols();
  if (ffn.weight.rows() != n || ffn.weight.cols() != 4 * n)
    throw DimensionError("feedforward: weights must be [N x 4N]");
  const auto h = dropout(gelu(linear(x, ffn)), dropout_rate, mode, rng);
  auto out = slice_cols(h, 0, n);
  for (std::size_t chunk = 1; chunk < 4; ++chunk) out = add(out, slice_cols(h, chunk * n, n));
  return out;
}

template <typename Real>
Tensor<Real> arn_block_forward(const Tensor<Real>& x, const BlockParams<Real>& block,
                               const ArnConfig& cfg, Mode mode, Rng& rng) {
  const auto& ln = block.norms;
  const double eps = cfg.layer_norm_eps;
  const auto y0 = layer_norm(x, ln[0].gamma, ln[0].beta, eps);
  const auto y1 = cfg.causal ? lstm_sequence(y0, block.rnn_fwd)
                             : blstm_sequence(y0, block.rnn_fwd, block.rnn_bwd, cfg);
  const auto q = layer_norm(y1, ln[1].gamma, ln[1].beta, eps);
  const auto kv = layer_norm(y1, ln[2].gamma, ln[2].beta, eps);
  const auto a = add(attention_block(q, kv, kv, block.attention, cfg.causal, mode), q);
  const auto z1 = layer_norm(a, ln[3].gamma, ln[3].beta, eps);
  const auto z2 = layer_norm(a, ln[4].gamma, ln[4].beta, eps);
  return add(feedforward_block(z1, block.feedforward, cfg.dropout, mode, rng), z2);
}

template <typename Real>
Tensor<Real> arn_forward_frames(const Tensor<Real>& frames, const ModelParams<Real>& params,
                                const ArnConfig& cfg, Mode mode, Rng& rng) {
  if (frames.cols() != cfg.input_frame)
    throw DimensionError("arn: frames have " + std::to_string(frames.cols()) +
                         " samples, model expects " + std::to_string(cfg.input_frame));
  auto h = linear(frames, params.input_proj);
  for (const auto& block : params.blocks) h = arn_block_forward(h, block, cfg, mode, rng);
  return linear(h, params.output_proj);
}

template <typename Real>
Tensor<Real> arn_forward(const Tensor<Real>& x, const ModelParams<Real>& params,
                         const ArnConfig& cfg, Mode mode, Rng& rng) {
  cfg.validate();
  const auto framed = frame_signal(x, cfg.input_frame, cfg.shift, cfg.lookback());
  const auto out_frames = arn_forward_frames(framed.frames, params, cfg, mode, rng);
  return overlap_add(out_frames, cfg.shift, x.numel());
}

template <typename Real>
std::vector<Real> Model<Real>::enhance(std::span<const Real> noisy) const {
  NoGradGuard guard;
  Rng rng(0);  // unused in eval mode
  Tensor<Real> x(Shape{noisy.size()}, std::vector<Real>(noisy.begin(), noisy.end()));
  const auto y = arn_forward(x, params, config, Mode::Eval, rng);
  return {y.data().begin(), y.data().end()};
}

#define ARN_INSTANTIATE_MODEL(R)                                                               \
  template struct AttentionParams<R>;                                                          \
  template struct ModelParams<R>;                                                              \
  template struct Model<R>;                                                                    \
  template Tensor<R> linear(const Tensor<R>&, const Linear<R>&);                               \
  template Tensor<R> layer_norm(const Tensor<R>&, const Tensor<R>&, const Tensor<R>&, double); \
  template LstmState<R> lstm_step(const Tensor<R>&, const Tensor<R>&, const Tensor<R>&,        \
                                  const LstmWeights<R>&);                                      \
  template Tensor<R> lstm_sequence(const Tensor<R>&, const LstmWeights<R>&);                   \
  template Tensor<R> blstm_sequence(const Tensor<R>&, const LstmWeights<R>&,                   \
                                    const LstmWeights<R>&, const ArnConfig&);                  \
  template Tensor<R> attention_block(const Tensor<R>&, const Tensor<R>&, const Tensor<R>&,     \
                                     const AttentionParams<R>&, bool, Mode);                   \
  template Tensor<R> feedforward_block(const Tensor<R>&, const Linear<R>&, double, Mode, Rng&); \
  template Tensor<R> arn_block_forward(const Tensor<R>&, const BlockParams<R>&,                \
                                       const ArnConfig&, Mode, Rng&);                          \
  template Tensor<R> arn_forward_frames(const Tensor<R>&, const ModelParams<R>&,               \
                                        const ArnConfig&, Mode, Rng&);                         \
  template Tensor<R> arn_forward(const Tensor<R>&, const ModelParams<R>&, const ArnConfig&,    \
                                 Mode, Rng&);

ARN_INSTANTIATE_MODEL(float)
ARN_INSTANTIATE_MODEL(double)

#undef ARN_INSTANTIATE_MODEL

}  // namespace arn
