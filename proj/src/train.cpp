// src/train.cpp

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

#include "arn/train.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "arn/checkpoint.hpp"
#include "arn/error.hpp"

namespace arn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_count(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto n = std::stoull(v, &used);
    if (used == v.size() && v.find('-') == std::string::npos) return n;
  } catch (const std::exception&) {
  }
  throw ConfigurationError(key + ": expected a nonnegative integer, got '" + v + "'");
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigurationError(key + ": expected a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int n = std::stoi(v, &used);
    if (used == v.size()) return n;
  } catch (const std::exception&) {
  }
  throw ConfigurationError(key + ": expected an integer, got '" + v + "'");
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs == 0 || steps_per_epoch == 0 || batch == 0 || validate_every == 0)
    throw ConfigurationError("epochs, steps_per_epoch, batch and validate_every must be positive");
  if (!(lr_hi > lr_lo && lr_lo > 0))
    throw ConfigurationError("learning rates must satisfy lr_hi > lr_lo > 0");
  if (lr_knee >= epochs) throw ConfigurationError("lr_knee must be below the epoch count");
  if (lr_override && !(*lr_override >= 0)) throw ConfigurationError("lr override must be >= 0");
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigurationError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    auto& t = cfg.train;
    auto& m = cfg.mixing;
    if (key == "preset") {
      if (value == "causal") cfg.model = ArnConfig::causal_default();
      else if (value == "noncausal") cfg.model = ArnConfig::noncausal_default();
      else throw ConfigurationError("preset must be causal or noncausal");
    } else if (key == "epochs") t.epochs = to_count(key, value);
    else if (key == "steps_per_epoch") t.steps_per_epoch = to_count(key, value);
    else if (key == "batch") t.batch = to_count(key, value);
    else if (key == "lr_hi") t.lr_hi = to_real(key, value);
    else if (key == "lr_lo") t.lr_lo = to_real(key, value);
    else if (key == "lr_knee") t.lr_knee = to_count(key, value);
    else if (key == "lr") t.lr_override = to_real(key, value);
    else if (key == "loss") {
      try {
        t.loss = parse_loss_kind(value);
      } catch (const ParameterError& e) {
        throw ConfigurationError(e.what());
      }
    } else if (key == "validate_every") t.validate_every = to_count(key, value);
    else if (key == "selection") {
      if (value == "si_snr") t.selection = SelectionMetric::SiSnr;
      else if (value == "snr") t.selection = SelectionMetric::Snr;
      else throw ConfigurationError("selection must be si_snr or snr");
    } else if (key == "seed") t.seed = to_count(key, value);
    else if (key == "validation_size") t.validation_size = to_count(key, value);
    else if (key == "validation_snr_db") t.validation_snr_db = to_int(key, value);
    else if (key == "max_len") m.max_len = to_count(key, value);
    else if (key == "trim_threshold_db") m.trim_threshold_db = to_real(key, value);
    else if (key == "snr_set") {
      m.snr_set.clear();
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) m.snr_set.push_back(to_int(key, trim(item)));
      if (m.snr_set.empty()) throw ConfigurationError("snr_set is empty");
    } else {
      apply_config_field(cfg.model, key, value);
    }
  }
  cfg.model.validate();
  cfg.train.validate();
  if (cfg.mixing.max_len == 0) throw ConfigurationError("max_len must be positive");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config " + path.string());
  return parse_experiment_config(in);
}

double lr_schedule(std::size_t epoch, const TrainConfig& cfg) {
  if (epoch < 1 || epoch > cfg.epochs)
    throw ParameterError("lr_schedule: epoch " + std::to_string(epoch) + " outside [1, " +
                         std::to_string(cfg.epochs) + "]");
  if (epoch <= cfg.lr_knee) return cfg.lr_hi;
  const double r = static_cast<double>(epoch - cfg.lr_knee) /
                   static_cast<double>(cfg.epochs - cfg.lr_knee);
  // lr_hi^(1-r) lr_lo^r, written so both endpoints come out exact.
  return std::pow(cfg.lr_hi, 1.0 - r) * std::pow(cfg.lr_lo, r);
}

BatchSampler corpus_sampler(const Corpus& speech, const Corpus& noise, MixingConfig cfg) {
  return [&speech, &noise, cfg = std::move(cfg)](Rng& rng, std::size_t batch) {
    return sample_training_batch(rng, speech, noise, batch, cfg);
  };
}

LogSink csv_log(std::ostream& out) {
  out << "epoch,step,loss,lr\n";
  return [&out](const TrainLogRecord& r) {
    out << r.epoch << ',' << r.step << ',' << std::setprecision(9) << r.loss << ','
        << std::setprecision(6) << r.lr << '\n';
    out.flush();
  };
}

Rng epoch_rng(std::uint64_t seed, std::size_t epoch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  return Rng(seq);
}

Tensor<float> batch_loss(const std::vector<MixPair>& batch, const ModelParams<float>& params,
                         const ArnConfig& model, LossKind kind, Mode mode, Rng& rng) {
  if (batch.empty()) throw ConfigurationError("empty training batch");
  Tensor<float> total;
  for (const auto& pair : batch) {
    const Tensor<float> x(Shape{pair.noisy.size()}, pair.noisy);
    const Tensor<float> s(Shape{pair.clean.size()}, pair.clean);
    const auto est = arn_forward(x, params, model, mode, rng);
    const auto l = compute_loss(kind, x, s, est).value;
    total = total.defined() ? add(total, l) : l;
  }
  return scale(total, 1.0f / static_cast<float>(batch.size()));
}

double train_epoch(ModelParams<float>& params, AdamState<float>& adam, const ArnConfig& model,
                   const TrainConfig& cfg, const BatchSampler& sampler, std::size_t epoch,
                   const LogSink& log) {
  cfg.validate();
  auto tensors = params.parameters();
  if (adam.m.empty()) adam = AdamState<float>::for_params(tensors);
  const double lr = cfg.lr_override ? *cfg.lr_override : lr_schedule(epoch, cfg);
  Rng rng = epoch_rng(cfg.seed, epoch);
  double total = 0;
  for (std::size_t step = 1; step <= cfg.steps_per_epoch; ++step) {
    const auto batch = sampler(rng, cfg.batch);
    auto diverged = [&](const std::string& what) {
      std::ostringstream msg;
      msg << what << " at epoch " << epoch << ", step " << step << " (lr " << lr
          << ", adam step " << adam.step_count << ")";
      return DivergenceError(msg.str());
    };
    Tensor<float> loss;
    try {
      loss = batch_loss(batch, params, model, cfg.loss, Mode::Train, rng);
    } catch (const DegenerateRowError& e) {
      throw diverged(std::string("non-finite activations (") + e.what() + ")");
    }
    const double value = loss.item();
    if (!std::isfinite(value)) throw diverged("non-finite loss " + std::to_string(value));
    backward(loss);
    adam_step(tensors, adam, lr);
    if (log) log({epoch, step, value, lr});
    total += value;
  }
  return total / static_cast<double>(cfg.steps_per_epoch);
}

double selection_score(std::span<const float> clean, std::span<const float> estimate,
                       SelectionMetric metric) {
  return metric == SelectionMetric::SiSnr ? si_snr_db(clean, estimate) : snr_db(clean, estimate);
}

ValidationResult validate_and_select(ModelParams<float>& params, const ArnConfig& model,
                                     const std::vector<MixPair>& val_set, double best_so_far,
                                     SelectionMetric metric) {
  params.refresh_v_gate_caches();
  const Model<float> m{model, params};
  return validate_and_select([&m](std::span<const float> x) { return m.enhance(x); }, val_set,
                             best_so_far, metric);
}

ValidationResult validate_and_select(const Enhancer& enhance, const std::vector<MixPair>& val_set,
                                     double best_so_far, SelectionMetric metric) {
  if (val_set.empty()) throw ConfigurationError("validation set is empty");
  double total = 0;
  for (const auto& pair : val_set) {
    const auto enhanced = enhance(pair.noisy);
    if (enhanced.size() != pair.clean.size())
      throw DimensionError("validation: enhanced length differs from the reference");
    total += selection_score(pair.clean, enhanced, metric);
  }
  ValidationResult r;
  r.score = total / static_cast<double>(val_set.size());
  r.improved = r.score > best_so_far;
  return r;
}

std::vector<MixPair> make_validation_set(const Corpus& speech, const Corpus& noise,
                                         const TrainConfig& cfg, const MixingConfig& mixing) {
  MixingConfig fixed = mixing;
  fixed.snr_set = {cfg.validation_snr_db};
  Rng rng(cfg.seed ^ 0x76616c6964617465ULL);
  return sample_training_batch(rng, speech, noise, cfg.validation_size, fixed);
}

TrainResult run_training(const ArnConfig& model, const TrainConfig& cfg,
                         const BatchSampler& sampler, const std::vector<MixPair>& val_set,
                         const std::filesystem::path& out_dir,
                         std::optional<ModelParams<float>> init) {
  model.validate();
  cfg.validate();
  TrainResult result;
  auto params = init ? std::move(*init) : ModelParams<float>::init(model, cfg.seed);
  auto adam = AdamState<float>::for_params(params.parameters());

  std::ofstream log_file;
  LogSink log;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    log_file.open(out_dir / "train.log", std::ios::trunc);
    if (!log_file) throw ConfigurationError("cannot write " + (out_dir / "train.log").string());
    log = csv_log(log_file);
  }

  result.best_params = params.clone();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    result.epoch_losses.push_back(train_epoch(params, adam, model, cfg, sampler, epoch, log));
    const bool validate_now = epoch % cfg.validate_every == 0 || epoch == cfg.epochs;
    if (validate_now && !val_set.empty()) {
      const auto v = validate_and_select(params, model, val_set, result.best_score, cfg.selection);
      result.validation_scores.emplace_back(epoch, v.score);
      if (v.improved) {
        result.best_score = v.score;
        result.best_epoch = epoch;
        result.best_params = params.clone();
        if (!out_dir.empty()) {
          Checkpoint best{kCheckpointFormatVersion, model, result.best_params, std::nullopt,
                          v.score, epoch};
          save_checkpoint(best, out_dir / "best.ckpt");
        }
      }
    }
    if (!out_dir.empty()) {
      Checkpoint last{kCheckpointFormatVersion, model, params, adam, result.best_score, epoch};
      save_checkpoint(last, out_dir / "last.ckpt");
    }
  }
  if (val_set.empty()) {
    result.best_params = params.clone();
    result.best_epoch = cfg.epochs;
  }
  result.params = std::move(params);
  return result;
}

}  // namespace arn
