// src/ops.cpp

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

#include "arn/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "arn/error.hpp"

namespace arn {

namespace {

template <typename Real>
using RowMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Real>
using MapC = Eigen::Map<const RowMat<Real>>;
template <typename Real>
using Map = Eigen::Map<RowMat<Real>>;

template <typename Real>
std::vector<Real> copy_data(const Tensor<Real>& t) {
  return {t.data().begin(), t.data().end()};
}

enum class Broadcast { Same, Row };

template <typename Real>
Broadcast classify(const Tensor<Real>& a, const Tensor<Real>& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::Same;
  const bool b_is_row = (b.rank() == 1) || (b.rank() == 2 && b.shape()[0] == 1);
  if (a.rank() == 2 && b_is_row && b.numel() == a.cols()) return Broadcast::Row;
  throw DimensionError(std::string(op) + ": shapes " + shape_str(a.shape()) + " and " +
                       shape_str(b.shape()) + " are not compatible");
}

// Elementwise unary op with derivative expressed through (x, y).
template <typename Real, typename F, typename D>
Tensor<Real> unary(const Tensor<Real>& a, const char* name, F f, D dfdx) {
  std::vector<Real> out(a.numel());
  auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i]);
  std::vector<Real> y_saved = out;
  return record<Real>(a.shape(), std::move(out), {a}, name,
                      [a, y = std::move(y_saved), dfdx](std::span<const Real> g) mutable {
                        auto x = a.data();
                        auto ga = a.mutable_grad();
                        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * dfdx(x[i], y[i]);
                      });
}

template <typename Real>
Real normal_cdf(Real x) {
  return Real(0.5) * (Real(1) + std::erf(x / std::numbers::sqrt2_v<Real>));
}

template <typename Real>
Real normal_pdf(Real x) {
  return std::exp(Real(-0.5) * x * x) / std::sqrt(Real(2) * std::numbers::pi_v<Real>);
}

}  // namespace

template <typename Real>
Tensor<Real> matmul(const Tensor<Real>& a, const Tensor<Real>& b) {
  if (a.rank() > 2 || b.rank() > 2) throw DimensionError("matmul: operands must be rank <= 2");
  const std::size_t t = a.rows(), k = a.cols(), s = b.cols();
  if (b.rows() != k)
    throw DimensionError("matmul: inner extents differ, " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
  std::vector<Real> out(t * s);
  Map<Real>(out.data(), t, s).noalias() =
      MapC<Real>(a.data().data(), t, k) * MapC<Real>(b.data().data(), k, s);
  return record<Real>(Shape{t, s}, std::move(out), {a, b}, "matmul",
                      [a, b, t, k, s](std::span<const Real> g) mutable {
                        MapC<Real> gm(g.data(), t, s);
                        if (a.requires_grad())
                          Map<Real>(a.mutable_grad().data(), t, k).noalias() +=
                              gm * MapC<Real>(b.data().data(), k, s).transpose();
                        if (b.requires_grad())
                          Map<Real>(b.mutable_grad().data(), k, s).noalias() +=
                              MapC<Real>(a.data().data(), t, k).transpose() * gm;
                      });
}

template <typename Real>
Tensor<Real> transpose(const Tensor<Real>& a) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<Real> out(r * c);
  Map<Real>(out.data(), c, r) = MapC<Real>(a.data().data(), r, c).transpose();
  return record<Real>(Shape{c, r}, std::move(out), {a}, "transpose",
                      [a, r, c](std::span<const Real> g) mutable {
                        Map<Real>(a.mutable_grad().data(), r, c) +=
                            MapC<Real>(g.data(), c, r).transpose();
                      });
}

template <typename Real>
Tensor<Real> add(const Tensor<Real>& a, const Tensor<Real>& b) {
  const auto mode = classify(a, b, "add");
  std::vector<Real> out = copy_data(a);
  const std::size_t c = mode == Broadcast::Row ? a.cols() : out.size();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i % c];
  return record<Real>(a.shape(), std::move(out), {a, b}, "add",
                      [a, b, c](std::span<const Real> g) mutable {
                        if (a.requires_grad()) {
                          auto ga = a.mutable_grad();
                          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                        }
                        if (b.requires_grad()) {
                          auto gb = b.mutable_grad();
                          for (std::size_t i = 0; i < g.size(); ++i) gb[i % c] += g[i];
                        }
                      });
}

template <typename Real>
Tensor<Real> sub(const Tensor<Real>& a, const Tensor<Real>& b) {
  const auto mode = classify(a, b, "sub");
  std::vector<Real> out = copy_data(a);
  const std::size_t c = mode == Broadcast::Row ? a.cols() : out.size();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i % c];
  return record<Real>(a.shape(), std::move(out), {a, b}, "sub",
                      [a, b, c](std::span<const Real> g) mutable {
                        if (a.requires_grad()) {
                          auto ga = a.mutable_grad();
                          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                        }
                        if (b.requires_grad()) {
                          auto gb = b.mutable_grad();
                          for (std::size_t i = 0; i < g.size(); ++i) gb[i % c] -= g[i];
                        }
                      });
}

template <typename Real>
Tensor<Real> mul(const Tensor<Real>& a, const Tensor<Real>& b) {
  const auto mode = classify(a, b, "mul");
  std::vector<Real> out = copy_data(a);
  const std::size_t c = mode == Broadcast::Row ? a.cols() : out.size();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i % c];
  return record<Real>(a.shape(), std::move(out), {a, b}, "mul",
                      [a, b, c](std::span<const Real> g) mutable {
                        if (a.requires_grad()) {
                          auto ga = a.mutable_grad();
                          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i % c];
                        }
                        if (b.requires_grad()) {
                          auto gb = b.mutable_grad();
                          for (std::size_t i = 0; i < g.size(); ++i) gb[i % c] += g[i] * a[i];
                        }
                      });
}

template <typename Real>
Tensor<Real> scale(const Tensor<Real>& a, Real factor) {
  std::vector<Real> out = copy_data(a);
  for (auto& v : out) v *= factor;
  return record<Real>(a.shape(), std::move(out), {a}, "scale",
                      [a, factor](std::span<const Real> g) mutable {
                        auto ga = a.mutable_grad();
                        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
                      });
}

template <typename Real>
Tensor<Real> sigmoid(const Tensor<Real>& a) {
  return unary(
      a, "sigmoid", [](Real x) { return Real(1) / (Real(1) + std::exp(-x)); },
      [](Real, Real y) { return y * (Real(1) - y); });
}

template <typename Real>
Tensor<Real> tanh(const Tensor<Real>& a) {
  return unary(
      a, "tanh", [](Real x) { return std::tanh(x); }, [](Real, Real y) { return Real(1) - y * y; });
}

template <typename Real>
Tensor<Real> gelu(const Tensor<Real>& a) {
  return unary(
      a, "gelu", [](Real x) { return x * normal_cdf(x); },
      [](Real x, Real) { return normal_cdf(x) + x * normal_pdf(x); });
}

template <typename Real>
Tensor<Real> abs(const Tensor<Real>& a) {
  return unary(
      a, "abs", [](Real x) { return std::abs(x); },
      [](Real x, Real) { return x > 0 ? Real(1) : (x < 0 ? Real(-1) : Real(0)); });
}

template <typename Real>
Tensor<Real> sum(const Tensor<Real>& a) {
  Real total = 0;
  for (Real v : a.data()) total += v;
  return record<Real>(Shape{}, {total}, {a}, "sum", [a](std::span<const Real> g) mutable {
    for (auto& v : a.mutable_grad()) v += g[0];
  });
}

template <typename Real>
Tensor<Real> mean(const Tensor<Real>& a) {
  return scale(sum(a), Real(1) / static_cast<Real>(a.numel()));
}

template <typename Real>
Tensor<Real> softmax_rows(const Tensor<Real>& w) {
  const std::size_t r = w.rows(), c = w.cols();
  std::vector<Real> out(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    const Real* row = w.data().data() + i * c;
    Real* dst = out.data() + i * c;
    Real hi = -std::numeric_limits<Real>::infinity();
    for (std::size_t j = 0; j < c; ++j) hi = std::max(hi, row[j]);
    if (!std::isfinite(hi))
      throw DegenerateRowError("softmax_rows: row " + std::to_string(i) + " has no finite entry");
    Real denom = 0;
    for (std::size_t j = 0; j < c; ++j) {
      dst[j] = std::exp(row[j] - hi);  // exp(-inf) == 0 exactly
      denom += dst[j];
    }
    for (std::size_t j = 0; j < c; ++j) dst[j] /= denom;
  }
  std::vector<Real> y = out;
  return record<Real>(w.shape(), std::move(out), {w}, "softmax_rows",
                      [w, y = std::move(y), r, c](std::span<const Real> g) mutable {
                        auto gw = w.mutable_grad();
                        for (std::size_t i = 0; i < r; ++i) {
                          const Real* yi = y.data() + i * c;
                          const Real* gi = g.data() + i * c;
                          Real dot = 0;
                          for (std::size_t j = 0; j < c; ++j) dot += gi[j] * yi[j];
                          for (std::size_t j = 0; j < c; ++j) gw[i * c + j] += yi[j] * (gi[j] - dot);
                        }
                      });
}

template <typename Real>
Tensor<Real> causal_mask(const Tensor<Real>& w) {
  const std::size_t r = w.rows(), c = w.cols();
  std::vector<Real> out = copy_data(w);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < c; ++j) out[i * c + j] = -std::numeric_limits<Real>::infinity();
  return record<Real>(w.shape(), std::move(out), {w}, "causal_mask",
                      [w, r, c](std::span<const Real> g) mutable {
                        auto gw = w.mutable_grad();
                        for (std::size_t i = 0; i < r; ++i)
                          for (std::size_t j = 0; j <= i && j < c; ++j) gw[i * c + j] += g[i * c + j];
                      });
}

template <typename Real>
Tensor<Real> slice_cols(const Tensor<Real>& a, std::size_t begin, std::size_t count) {
  const std::size_t r = a.rows(), c = a.cols();
  if (count == 0 || begin + count > c)
    throw DimensionError("slice_cols: range [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") outside " + std::to_string(c) +
                         " columns");
  std::vector<Real> out(r * count);
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(a.data().data() + i * c + begin, count, out.data() + i * count);
  return record<Real>(Shape{r, count}, std::move(out), {a}, "slice_cols",
                      [a, r, c, begin, count](std::span<const Real> g) mutable {
                        auto ga = a.mutable_grad();
                        for (std::size_t i = 0; i < r; ++i)
                          for (std::size_t j = 0; j < count; ++j)
                            ga[i * c + begin + j] += g[i * count + j];
                      });
}

template <typename Real>
Tensor<Real> concat_cols(const Tensor<Real>& a, const Tensor<Real>& b) {
  const std::size_t r = a.rows(), ca = a.cols(), cb = b.cols();
  if (b.rows() != r) throw DimensionError("concat_cols: row counts differ");
  const std::size_t c = ca + cb;
  std::vector<Real> out(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    std::copy_n(a.data().data() + i * ca, ca, out.data() + i * c);
    std::copy_n(b.data().data() + i * cb, cb, out.data() + i * c + ca);
  }
  return record<Real>(Shape{r, c}, std::move(out), {a, b}, "concat_cols",
                      [a, b, r, ca, cb, c](std::span<const Real> g) mutable {
                        if (a.requires_grad()) {
                          auto ga = a.mutable_grad();
                          for (std::size_t i = 0; i < r; ++i)
                            for (std::size_t j = 0; j < ca; ++j) ga[i * ca + j] += g[i * c + j];
                        }
                        if (b.requires_grad()) {
                          auto gb = b.mutable_grad();
                          for (std::size_t i = 0; i < r; ++i)
                            for (std::size_t j = 0; j < cb; ++j)
                              gb[i * cb + j] += g[i * c + ca + j];
                        }
                      });
}

template <typename Real>
Tensor<Real> reverse_rows(const Tensor<Real>& a) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<Real> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(a.data().data() + (r - 1 - i) * c, c, out.data() + i * c);
  return record<Real>(Shape{r, c}, std::move(out), {a}, "reverse_rows",
                      [a, r, c](std::span<const Real> g) mutable {
                        auto ga = a.mutable_grad();
                        for (std::size_t i = 0; i < r; ++i)
                          for (std::size_t j = 0; j < c; ++j)
                            ga[(r - 1 - i) * c + j] += g[i * c + j];
                      });
}

template <typename Real>
Tensor<Real> reshape(const Tensor<Real>& a, Shape shape) {
  if (shape_numel(shape) != a.numel())
    throw DimensionError("reshape: " + shape_str(a.shape()) + " to " + shape_str(shape));
  return record<Real>(std::move(shape), copy_data(a), {a}, "reshape",
                      [a](std::span<const Real> g) mutable {
                        auto ga = a.mutable_grad();
                        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                      });
}

template <typename Real>
Tensor<Real> dropout(const Tensor<Real>& x, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw ParameterError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  if (mode == Mode::Eval || rate == 0.0) return x;
  const Real keep_scale = Real(1) / static_cast<Real>(1.0 - rate);
  std::bernoulli_distribution keep(1.0 - rate);
  std::vector<Real> mask(x.numel());
  for (auto& m : mask) m = keep(rng) ? keep_scale : Real(0);
  std::vector<Real> out = copy_data(x);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return record<Real>(x.shape(), std::move(out), {x}, "dropout",
                      [x, mask = std::move(mask)](std::span<const Real> g) mutable {
                        auto gx = x.mutable_grad();
                        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * mask[i];
                      });
}

#define ARN_INSTANTIATE_OPS(R)                                                      \
  template Tensor<R> matmul(const Tensor<R>&, const Tensor<R>&);                    \
  template Tensor<R> transpose(const Tensor<R>&);                                   \
  template Tensor<R> add(const Tensor<R>&, const Tensor<R>&);                       \
  template Tensor<R> sub(const Tensor<R>&, const Tensor<R>&);                       \
  template Tensor<R> mul(const Tensor<R>&, const Tensor<R>&);                       \
  template Tensor<R> scale(const Tensor<R>&, R);                                    \
  template Tensor<R> sigmoid(const Tensor<R>&);                                     \
  template Tensor<R> tanh(const Tensor<R>&);                                        \
  template Tensor<R> gelu(const Tensor<R>&);                                        \
  template Tensor<R> abs(const Tensor<R>&);                                         \
  template Tensor<R> sum(const Tensor<R>&);                                         \
  template Tensor<R> mean(const Tensor<R>&);                                        \
  template Tensor<R> softmax_rows(const Tensor<R>&);                                \
  template Tensor<R> causal_mask(const Tensor<R>&);                                 \
  template Tensor<R> slice_cols(const Tensor<R>&, std::size_t, std::size_t);        \
  template Tensor<R> concat_cols(const Tensor<R>&, const Tensor<R>&);               \
  template Tensor<R> reverse_rows(const Tensor<R>&);                                \
  template Tensor<R> reshape(const Tensor<R>&, Shape);                              \
  template Tensor<R> dropout(const Tensor<R>&, double, Mode, Rng&);

ARN_INSTANTIATE_OPS(float)
ARN_INSTANTIATE_OPS(double)

#undef ARN_INSTANTIATE_OPS

}  // namespace arn
