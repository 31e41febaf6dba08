// tools/cli.cpp

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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "arn/checkpoint.hpp"
#include "arn/error.hpp"
#include "arn/losses.hpp"
#include "arn/mixing.hpp"
#include "arn/train.hpp"
#include "arn/wav.hpp"

namespace arn::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct PairEntry {
  fs::path clean;
  fs::path degraded;
};

// `<clean>\t<degraded>` per line, paths relative to the manifest.
std::vector<PairEntry> read_pairs(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ConfigurationError("cannot open pair manifest " + manifest.string());
  std::vector<PairEntry> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ConfigurationError(manifest.string() + ":" + std::to_string(lineno) +
                               ": expected '<clean>\\t<degraded>'");
    const auto base = manifest.parent_path();
    pairs.push_back({base / line.substr(0, tab), base / line.substr(tab + 1)});
  }
  if (pairs.empty()) throw ConfigurationError(manifest.string() + ": no pairs");
  return pairs;
}

Checkpoint load_model(const fs::path& path, const std::string& config_path) {
  auto ckpt = load_checkpoint(path);
  if (!config_path.empty()) check_compatible(load_experiment_config(config_path).model, ckpt.config);
  return ckpt;
}

void enhance_file(const Model<float>& model, const fs::path& in, const fs::path& out,
                  WavEncoding encoding) {
  const auto wav = read_wav(in);
  const auto y = model.enhance(wav.samples);
  write_wav(out, y, encoding);
}

int cmd_enhance(const std::string& model_path, const std::string& in_path,
                const std::string& out_path, bool pcm16, const std::string& config_path,
                std::ostream& out) {
  const auto ckpt = load_model(model_path, config_path);
  const Model<float> model{ckpt.config, ckpt.params};
  const auto encoding = pcm16 ? WavEncoding::Pcm16 : WavEncoding::Float32;
  if (!fs::is_directory(in_path)) {
    enhance_file(model, in_path, out_path, encoding);
    out << json{{"in", in_path}, {"out", out_path}}.dump() << '\n';
    return kOk;
  }
  std::vector<fs::path> inputs;
  for (const auto& e : fs::directory_iterator(in_path))
    if (e.is_regular_file() && e.path().extension() == ".wav") inputs.push_back(e.path());
  std::sort(inputs.begin(), inputs.end());
  fs::create_directories(out_path);
  for (const auto& p : inputs) {
    const auto target = fs::path(out_path) / p.filename();
    enhance_file(model, p, target, encoding);
    out << json{{"in", p.string()}, {"out", target.string()}}.dump() << '\n';
  }
  return kOk;
}

int cmd_evaluate(const std::string& model_path, const std::string& pairs_path,
                 const std::string& config_path, std::ostream& out) {
  std::optional<Model<float>> model;
  if (!model_path.empty()) {
    auto ckpt = load_model(model_path, config_path);
    model.emplace(Model<float>{ckpt.config, std::move(ckpt.params)});
  }
  double snr_sum = 0, si_sum = 0;
  const auto pairs = read_pairs(pairs_path);
  for (const auto& p : pairs) {
    const auto clean = read_wav(p.clean).samples;
    auto estimate = read_wav(p.degraded).samples;
    if (model) estimate = model->enhance(estimate);
    if (clean.size() != estimate.size())
      throw DimensionError("evaluate: " + p.clean.string() + " has " +
                           std::to_string(clean.size()) + " samples, " + p.degraded.string() +
                           " has " + std::to_string(estimate.size()));
    const double snr = snr_db(std::span<const float>(clean), std::span<const float>(estimate));
    const double si = si_snr_db(std::span<const float>(clean), std::span<const float>(estimate));
    snr_sum += snr;
    si_sum += si;
    out << json{{"clean", p.clean.string()},
                {"degraded", p.degraded.string()},
                {"snr_db", snr},
                {"si_snr_db", si}}
               .dump()
        << '\n';
  }
  const double n = static_cast<double>(pairs.size());
  out << json{{"mean", true}, {"pairs", pairs.size()}, {"snr_db", snr_sum / n},
              {"si_snr_db", si_sum / n}}
             .dump()
      << '\n';
  return kOk;
}

int cmd_mix(const std::string& speech_path, const std::string& noise_path, int snr,
            const std::string& prefix, std::uint64_t seed, bool pcm16, std::ostream& out) {
  const auto speech = read_wav(speech_path).samples;
  const auto noise = read_wav(noise_path).samples;
  MixtureRecipe recipe;
  recipe.speech_id = speech_path;
  recipe.noise_id = noise_path;
  recipe.snr_db = snr;
  recipe.seed = seed;
  recipe.length = std::min(speech.size(), noise.size());
  if (noise.size() > recipe.length) {
    Rng rng(seed);
    recipe.noise_offset =
        std::uniform_int_distribution<std::size_t>(0, noise.size() - recipe.length)(rng);
  }
  const auto pair = make_mixture(recipe, speech, noise);
  const auto encoding = pcm16 ? WavEncoding::Pcm16 : WavEncoding::Float32;
  write_wav(prefix + ".noisy.wav", pair.noisy, encoding);
  write_wav(prefix + ".clean.wav", pair.clean, encoding);
  out << json{{"noisy", prefix + ".noisy.wav"},
              {"clean", prefix + ".clean.wav"},
              {"snr_db", snr},
              {"noise_offset", recipe.noise_offset},
              {"length", recipe.length}}
             .dump()
      << '\n';
  return kOk;
}

int cmd_train(const std::string& config_path, const std::string& speech_index,
              const std::string& noise_index, const std::string& out_dir,
              const std::string& validation, std::optional<std::uint64_t> seed,
              std::ostream& out) {
  auto cfg = load_experiment_config(config_path);
  if (seed) cfg.train.seed = *seed;
  const auto speech = Corpus::load(CorpusIndex::load(speech_index, CorpusKind::Speech));
  const auto noise = Corpus::load(CorpusIndex::load(noise_index, CorpusKind::Noise));
  std::vector<MixPair> val_set;
  if (!validation.empty()) {
    for (const auto& p : read_pairs(validation))
      val_set.push_back({read_wav(p.degraded).samples, read_wav(p.clean).samples});
  } else {
    val_set = make_validation_set(speech, noise, cfg.train, cfg.mixing);
  }
  fs::create_directories(out_dir);
  const auto result =
      run_training(cfg.model, cfg.train, corpus_sampler(speech, noise, cfg.mixing), val_set, out_dir);
  for (std::size_t e = 0; e < result.epoch_losses.size(); ++e)
    out << json{{"epoch", e + 1}, {"loss", result.epoch_losses[e]}}.dump() << '\n';
  out << json{{"best_epoch", result.best_epoch},
              {"best_score", result.best_score},
              {"out", out_dir}}
             .dump()
      << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attentive recurrent network for time-domain speech enhancement", "arn"};
  app.require_subcommand(1);

  std::string config, speech_index, noise_index, out_dir, validation;
  std::optional<std::uint64_t> seed;
  auto* train = app.add_subcommand("train", "Train a model with online mixing");
  train->add_option("--config", config, "Experiment config (key = value)")->required();
  train->add_option("--speech-index", speech_index, "Speech corpus index")->required();
  train->add_option("--noise-index", noise_index, "Noise corpus index")->required();
  train->add_option("--out", out_dir, "Output directory")->required();
  train->add_option("--validation", validation, "Validation pairs manifest");
  train->add_option("--seed", seed, "Training seed")->envname("ARN_SEED");

  std::string model, in, enhance_out, model_config;
  bool pcm16 = false;
  auto* enhance = app.add_subcommand("enhance", "Enhance a WAV file or a directory of WAV files");
  enhance->add_option("--model", model, "Checkpoint")->required();
  enhance->add_option("--in", in, "Input WAV or directory")->required();
  enhance->add_option("--out", enhance_out, "Output WAV or directory")->required();
  enhance->add_flag("--pcm16", pcm16, "Write 16-bit PCM instead of float");
  enhance->add_option("--config", model_config, "Experiment config the model must match");

  std::string eval_model, pairs, eval_config;
  auto* evaluate = app.add_subcommand("evaluate", "Score degraded or enhanced audio");
  evaluate->add_option("--model", eval_model, "Checkpoint applied to the degraded side first");
  evaluate->add_option("--pairs", pairs, "Manifest of <clean>\\t<degraded> lines")->required();
  evaluate->add_option("--config", eval_config, "Experiment config the model must match");

  std::string speech, noise, prefix;
  int snr = 0;
  std::uint64_t mix_seed = 0;
  bool mix_pcm16 = false;
  auto* mix = app.add_subcommand("mix", "Mix speech and noise at a given SNR");
  mix->add_option("--speech", speech, "Speech WAV")->required();
  mix->add_option("--noise", noise, "Noise WAV")->required();
  mix->add_option("--snr", snr, "SNR in dB (integer)")->required();
  mix->add_option("--out", prefix, "Output prefix")->required();
  mix->add_option("--seed", mix_seed, "Seed for the noise offset")->envname("ARN_SEED");
  mix->add_flag("--pcm16", mix_pcm16, "Write 16-bit PCM instead of float");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(config, speech_index, noise_index, out_dir, validation, seed, out);
    if (*enhance) return cmd_enhance(model, in, enhance_out, pcm16, model_config, out);
    if (*evaluate) return cmd_evaluate(eval_model, pairs, eval_config, out);
    if (*mix) return cmd_mix(speech, noise, snr, prefix, mix_seed, mix_pcm16, out);
  } catch (const ShapeMismatchError& e) {
    err << "arn: compatibility error: " << e.what() << '\n';
    return kCompatibility;
  } catch (const CompatibilityError& e) {
    err << "arn: compatibility error: " << e.what() << '\n';
    return kCompatibility;
  } catch (const CheckpointError& e) {
    err << "arn: format error: " << e.what() << '\n';
    return kFormat;
  } catch (const FormatError& e) {
    err << "arn: format error: " << e.what() << '\n';
    return kFormat;
  } catch (const ConfigurationError& e) {
    err << "arn: usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "arn: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace arn::cli
