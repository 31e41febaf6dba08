// arn/train.hpp

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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "arn/losses.hpp"
#include "arn/mixing.hpp"
#include "arn/model.hpp"
#include "arn/optim.hpp"

namespace arn {

enum class SelectionMetric { SiSnr, Snr };

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t steps_per_epoch = 100;  // one epoch of online mixing
  std::size_t batch = 32;
  double lr_hi = 2e-4;
  double lr_lo = 2e-5;
  std::size_t lr_knee = 33;
  std::optional<double> lr_override;  // constant learning rate when set
  LossKind loss = LossKind::Mse;
  std::size_t validate_every = 2;
  SelectionMetric selection = SelectionMetric::SiSnr;
  std::uint64_t seed = 0;
  std::size_t validation_size = 16;  // pairs generated when no manifest is given
  int validation_snr_db = -5;

  void validate() const;
};

/// Model, training and mixing settings read from one `key = value` file.
struct ExperimentConfig {
  ArnConfig model = ArnConfig::causal_default();
  TrainConfig train;
  MixingConfig mixing;
};

/// `#` starts a comment. `preset = causal|noncausal` resets the model
/// settings and should come first. Throws ConfigurationError.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// lr_hi up to lr_knee, then exponential decay reaching lr_lo at `epochs`.
double lr_schedule(std::size_t epoch, const TrainConfig& cfg);

using BatchSampler = std::function<std::vector<MixPair>(Rng& rng, std::size_t batch)>;

BatchSampler corpus_sampler(const Corpus& speech, const Corpus& noise, MixingConfig cfg = {});

struct TrainLogRecord {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double loss = 0;
  double lr = 0;
};

using LogSink = std::function<void(const TrainLogRecord&)>;

/// Writes `epoch,step,loss,lr` CSV lines (with a header) to `out`.
LogSink csv_log(std::ostream& out);

/// RNG stream for one epoch; depends only on the seed and the epoch.
Rng epoch_rng(std::uint64_t seed, std::size_t epoch);

/// Mean of the per-utterance losses of one batch, as a graph node.
Tensor<float> batch_loss(const std::vector<MixPair>& batch, const ModelParams<float>& params,
                         const ArnConfig& model, LossKind kind, Mode mode, Rng& rng);

/// steps_per_epoch Adam steps at lr_schedule(epoch). Returns the mean step
/// loss. Throws DivergenceError on a non-finite loss before touching the
/// parameters for that step.
double train_epoch(ModelParams<float>& params, AdamState<float>& adam, const ArnConfig& model,
                   const TrainConfig& cfg, const BatchSampler& sampler, std::size_t epoch,
                   const LogSink& log = {});

struct ValidationResult {
  double score = 0;
  bool improved = false;
};

double selection_score(std::span<const float> clean, std::span<const float> estimate,
                       SelectionMetric metric);

/// Mean selection metric of the enhanced validation pairs in eval mode.
/// Refreshes the v-gate caches first.
ValidationResult validate_and_select(ModelParams<float>& params, const ArnConfig& model,
                                     const std::vector<MixPair>& val_set, double best_so_far,
                                     SelectionMetric metric = SelectionMetric::SiSnr);

using Enhancer = std::function<AudioBuffer(std::span<const float> noisy)>;

/// Same score for an arbitrary enhancement function.
ValidationResult validate_and_select(const Enhancer& enhance, const std::vector<MixPair>& val_set,
                                     double best_so_far,
                                     SelectionMetric metric = SelectionMetric::SiSnr);

/// Fixed validation pairs drawn with a dedicated seed at one SNR.
std::vector<MixPair> make_validation_set(const Corpus& speech, const Corpus& noise,
                                         const TrainConfig& cfg, const MixingConfig& mixing);

struct TrainResult {
  std::vector<double> epoch_losses;
  std::vector<std::pair<std::size_t, double>> validation_scores;
  double best_score = -std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  ModelParams<float> params;      // after the last epoch
  ModelParams<float> best_params;
};

/// Full loop. When `out_dir` is non-empty, writes `train.log`, `best.ckpt`
/// whenever validation improves and `last.ckpt` after every epoch.
TrainResult run_training(const ArnConfig& model, const TrainConfig& cfg,
                         const BatchSampler& sampler, const std::vector<MixPair>& val_set,
                         const std::filesystem::path& out_dir = {},
                         std::optional<ModelParams<float>> init = std::nullopt);

}  // namespace arn
