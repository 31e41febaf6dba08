// tests/test_train.cpp

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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "arn/checkpoint.hpp"
#include "arn/error.hpp"
#include "arn/train.hpp"

namespace arn {
namespace {

namespace fs = std::filesystem;

ArnConfig small_model(std::size_t hidden = 32) {
  ArnConfig cfg;
  cfg.hidden = hidden;
  cfg.input_frame = 32;
  cfg.output_frame = 16;
  cfg.shift = 8;
  cfg.num_blocks = 1;
  cfg.causal = true;
  cfg.dropout = 0.05;
  return cfg;
}

MixPair fixed_pair(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> dist(0.0f, 0.5f);
  AudioBuffer s(n), noise(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(0.07f * i) + 0.5f * std::sin(0.19f * i);
  for (auto& v : noise) v = dist(rng);
  return make_mixture(MixtureRecipe{"s", "n", 0, 0, n, -5, 0}, s, noise);
}

BatchSampler constant_sampler(MixPair pair) {
  return [pair](Rng&, std::size_t batch) { return std::vector<MixPair>(batch, pair); };
}

TrainConfig short_schedule(std::size_t steps) {
  TrainConfig t;
  t.epochs = 2;
  t.steps_per_epoch = steps;
  t.batch = 1;
  t.lr_knee = 1;
  t.lr_hi = 1e-3;
  t.lr_lo = 1e-4;
  t.validate_every = 1;
  t.seed = 17;
  return t;
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("arn_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(LrScheduleTest, Endpoints) {
  const TrainConfig cfg;
  EXPECT_EQ(lr_schedule(1, cfg), 0.0002);
  EXPECT_EQ(lr_schedule(33, cfg), 0.0002);
  EXPECT_EQ(lr_schedule(100, cfg), 0.00002);
  EXPECT_THROW(lr_schedule(0, cfg), ParameterError);
  EXPECT_THROW(lr_schedule(101, cfg), ParameterError);
}

TEST(LrScheduleTest, MonotoneAndGeometric) {
  const TrainConfig cfg;
  double prev = lr_schedule(1, cfg);
  for (std::size_t e = 2; e <= 100; ++e) {
    const double lr = lr_schedule(e, cfg);
    EXPECT_LE(lr, prev);
    prev = lr;
  }
  // Constant ratio between consecutive decayed epochs.
  const double ratio = std::pow(0.1, 1.0 / 67.0);
  for (std::size_t e = 34; e <= 100; ++e)
    EXPECT_NEAR(lr_schedule(e, cfg) / lr_schedule(e - 1, cfg), ratio, 1e-12);
}

TEST(ConfigTest, ParsesAllSections) {
  std::istringstream in(R"(
    # toy run
    preset = causal
    hidden = 32
    input_frame = 32
    output_frame = 16
    shift = 8
    num_blocks = 1
    epochs = 4
    lr_knee = 2
    steps_per_epoch = 3
    batch = 2
    loss = pcm
    selection = snr
    seed = 9
    snr_set = -5, 0, 5
    max_len = 16000
  )");
  const auto cfg = parse_experiment_config(in);
  EXPECT_EQ(cfg.model.hidden, 32u);
  EXPECT_EQ(cfg.model.input_frame, 32u);
  EXPECT_TRUE(cfg.model.causal);
  EXPECT_EQ(cfg.train.epochs, 4u);
  EXPECT_EQ(cfg.train.loss, LossKind::Pcm);
  EXPECT_EQ(cfg.train.selection, SelectionMetric::Snr);
  EXPECT_EQ(cfg.train.seed, 9u);
  EXPECT_EQ(cfg.mixing.snr_set, (std::vector<int>{-5, 0, 5}));
  EXPECT_EQ(cfg.mixing.max_len, 16000u);
}

TEST(ConfigTest, RejectsBadInput) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_experiment_config(in);
  };
  EXPECT_THROW(parse("bogus = 1\n"), ConfigurationError);
  EXPECT_THROW(parse("epochs = ten\n"), ConfigurationError);
  EXPECT_THROW(parse("epochs = 10\nlr_knee = 10\n"), ConfigurationError);
  EXPECT_THROW(parse("lr_hi = 1e-5\n"), ConfigurationError);
  EXPECT_THROW(parse("loss = l1\n"), ConfigurationError);
  EXPECT_THROW(parse("shift = 300\n"), ConfigurationError);
  EXPECT_THROW(parse("just a line\n"), ConfigurationError);
}

TEST(TrainEpochTest, ZeroLearningRateLeavesParameters) {
  const auto model = small_model();
  auto cfg = short_schedule(3);
  cfg.lr_override = 0.0;
  auto params = ModelParams<float>::init(model, 1);
  const auto before = params.clone();
  AdamState<float> adam;
  train_epoch(params, adam, model, cfg, constant_sampler(fixed_pair(800, 2)), 1);
  const auto a = params.parameters(), b = before.parameters();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].numel(); ++j) ASSERT_EQ(a[i][j], b[i][j]);
  EXPECT_EQ(adam.step_count, 3u);
}

TEST(TrainEpochTest, DescendsOnFixedUtterance) {
  const auto model = small_model(32);
  auto cfg = short_schedule(50);
  cfg.lr_override = 1e-3;
  const auto pair = fixed_pair(1600, 3);
  auto params = ModelParams<float>::init(model, 4);
  Rng probe(0);
  const double initial =
      batch_loss({pair}, params, model, cfg.loss, Mode::Eval, probe).item();
  AdamState<float> adam;
  const double epoch_loss = train_epoch(params, adam, model, cfg, constant_sampler(pair), 1);
  const double final_loss = batch_loss({pair}, params, model, cfg.loss, Mode::Eval, probe).item();
  EXPECT_LT(epoch_loss, initial);
  EXPECT_LT(final_loss, 0.5 * initial);
}

TEST(TrainEpochTest, DeterministicReplay) {
  const auto model = small_model();
  const auto cfg = short_schedule(4);
  auto speech = Corpus::from_buffers({"a"}, {fixed_pair(3000, 5).clean});
  auto noise = Corpus::from_buffers({"n"}, {fixed_pair(5000, 6).noisy});
  MixingConfig mixing;
  mixing.max_len = 1000;
  const auto sampler = corpus_sampler(speech, noise, mixing);
  std::vector<double> losses[2];
  std::vector<ModelParams<float>> finals;
  for (int run = 0; run < 2; ++run) {
    auto params = ModelParams<float>::init(model, 7);
    AdamState<float> adam;
    for (std::size_t epoch = 1; epoch <= 2; ++epoch)
      losses[run].push_back(train_epoch(params, adam, model, cfg, sampler, epoch,
                                        [&](const TrainLogRecord& r) { losses[run].push_back(r.loss); }));
    finals.push_back(params);
  }
  EXPECT_EQ(losses[0], losses[1]);
  const auto a = finals[0].parameters(), b = finals[1].parameters();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].numel(); ++j) ASSERT_EQ(a[i][j], b[i][j]);
}

TEST(TrainEpochTest, NonFiniteLossDiverges) {
  const auto model = small_model();
  const auto cfg = short_schedule(2);
  auto pair = fixed_pair(400, 8);
  pair.noisy[10] = std::numeric_limits<float>::quiet_NaN();
  auto params = ModelParams<float>::init(model, 9);
  const auto before = params.clone();
  AdamState<float> adam;
  EXPECT_THROW(train_epoch(params, adam, model, cfg, constant_sampler(pair), 1), DivergenceError);
  const auto a = params.parameters(), b = before.parameters();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].numel(); ++j) ASSERT_EQ(a[i][j], b[i][j]);
}

// Noise orthogonal to a zero-mean clean signal puts SI-SNR at exactly the
// energy ratio.
MixPair pair_at_si_snr(double db) {
  const std::size_t n = 1000;
  AudioBuffer s(n), e(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = static_cast<float>(std::sin(2 * M_PI * 5 * i / n));
    e[i] = static_cast<float>(std::cos(2 * M_PI * 13 * i / n));
  }
  const double gain = std::pow(10.0, -db / 20.0);  // both have the same energy
  MixPair p{AudioBuffer(n), s};
  for (std::size_t i = 0; i < n; ++i) p.noisy[i] = static_cast<float>(s[i] + gain * e[i]);
  return p;
}

TEST(ValidationTest, MeanOfPerUtteranceScores) {
  const std::vector<MixPair> set = {pair_at_si_snr(3.0), pair_at_si_snr(5.0)};
  const Enhancer identity = [](std::span<const float> x) { return AudioBuffer(x.begin(), x.end()); };
  const auto r = validate_and_select(identity, set, 3.9);
  EXPECT_NEAR(r.score, 4.0, 1e-4);
  EXPECT_TRUE(r.improved);
  EXPECT_FALSE(validate_and_select(identity, set, 4.1).improved);
  EXPECT_THROW(validate_and_select(identity, {}, 0.0), ConfigurationError);
}

TEST(ValidationTest, OracleEnhancerHitsCap) {
  auto p = fixed_pair(500, 10);
  p.noisy = p.clean;
  const Enhancer identity = [](std::span<const float> x) { return AudioBuffer(x.begin(), x.end()); };
  const auto r = validate_and_select(identity, {p}, 99.0);
  EXPECT_EQ(r.score, kMetricCapDb);
  EXPECT_TRUE(r.improved);
}

TEST(ValidationTest, ModelScoreIsRepeatable) {
  const auto model = small_model();
  auto params = ModelParams<float>::init(model, 11);
  const std::vector<MixPair> set = {fixed_pair(700, 12), fixed_pair(900, 13)};
  const auto a = validate_and_select(params, model, set, -1e9);
  const auto b = validate_and_select(params, model, set, -1e9);
  EXPECT_EQ(a.score, b.score);
  EXPECT_TRUE(std::isfinite(a.score));
}

Checkpoint sample_checkpoint() {
  const auto model = small_model(16);
  Checkpoint c;
  c.config = model;
  c.params = ModelParams<float>::init(model, 21);
  c.adam = AdamState<float>::for_params(c.params.parameters());
  std::mt19937_64 rng(22);
  std::normal_distribution<float> dist;
  for (auto& m : c.adam->m)
    for (auto& v : m) v = dist(rng);
  for (auto& m : c.adam->v)
    for (auto& v : m) v = std::abs(dist(rng));
  c.adam->step_count = 123;
  c.best_validation_score = 7.25;
  c.epoch = 6;
  return c;
}

TEST(CheckpointTest, RoundTripIsBitIdentical) {
  const auto dir = temp_dir("ckpt_roundtrip");
  auto c = sample_checkpoint();
  save_checkpoint(c, dir / "m.ckpt");
  EXPECT_FALSE(fs::exists(dir / "m.ckpt.tmp"));
  const auto d = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(d.config, c.config);
  EXPECT_EQ(d.epoch, 6u);
  EXPECT_EQ(d.best_validation_score, 7.25);
  const auto a = c.params.named_parameters(), b = d.params.named_parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].first, b[i].first);
    for (std::size_t j = 0; j < a[i].second.numel(); ++j)
      ASSERT_EQ(std::bit_cast<std::uint32_t>(a[i].second[j]),
                std::bit_cast<std::uint32_t>(b[i].second[j]));
  }
  const auto ba = c.params.named_buffers(), bb = d.params.named_buffers();
  ASSERT_EQ(ba.size(), bb.size());
  for (std::size_t i = 0; i < ba.size(); ++i)
    for (std::size_t j = 0; j < ba[i].second.numel(); ++j)
      ASSERT_EQ(ba[i].second[j], bb[i].second[j]);
  ASSERT_TRUE(d.adam.has_value());
  EXPECT_EQ(d.adam->step_count, 123u);
  EXPECT_EQ(d.adam->m, c.adam->m);
  EXPECT_EQ(d.adam->v, c.adam->v);
}

TEST(CheckpointTest, EnhanceUnchangedAfterReload) {
  const auto dir = temp_dir("ckpt_enhance");
  auto c = sample_checkpoint();
  save_checkpoint(c, dir / "m.ckpt");
  const auto d = load_checkpoint(dir / "m.ckpt");
  const Model<float> before{c.config, c.params}, after{d.config, d.params};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto x = fixed_pair(1234, seed).noisy;
    const auto y0 = before.enhance(x), y1 = after.enhance(x);
    ASSERT_EQ(y0.size(), y1.size());
    for (std::size_t i = 0; i < y0.size(); ++i)
      ASSERT_EQ(std::bit_cast<std::uint32_t>(y0[i]), std::bit_cast<std::uint32_t>(y1[i]));
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

TEST(CheckpointTest, DistinctLoadErrors) {
  const auto dir = temp_dir("ckpt_errors");
  auto c = sample_checkpoint();
  save_checkpoint(c, dir / "m.ckpt");
  const auto good = slurp(dir / "m.ckpt");

  spit(dir / "trunc.ckpt", good.substr(0, good.size() - 100));
  EXPECT_THROW(load_checkpoint(dir / "trunc.ckpt"), TruncatedPayloadError);

  spit(dir / "garbage.ckpt", "hello world\n");
  EXPECT_THROW(load_checkpoint(dir / "garbage.ckpt"), CorruptHeaderError);

  auto bad_key = good;
  bad_key.replace(bad_key.find("[train]"), 7, "[trian]");
  spit(dir / "key.ckpt", bad_key);
  EXPECT_THROW(load_checkpoint(dir / "key.ckpt"), CorruptHeaderError);

  auto shape = good;
  shape.replace(shape.find("hidden=16"), 9, "hidden=18");
  spit(dir / "shape.ckpt", shape);
  EXPECT_THROW(load_checkpoint(dir / "shape.ckpt"), ShapeMismatchError);

  auto version = good;
  version.replace(version.find("format_version=1"), 16, "format_version=9");
  spit(dir / "version.ckpt", version);
  EXPECT_THROW(load_checkpoint(dir / "version.ckpt"), CompatibilityError);

  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), CheckpointError);
}

TEST(CheckpointTest, CompatibilityCheck) {
  const auto a = small_model(16);
  auto b = a;
  EXPECT_NO_THROW(check_compatible(a, b));
  b.dropout = 0.3;  // not architectural
  EXPECT_NO_THROW(check_compatible(a, b));
  b.hidden = 32;
  EXPECT_THROW(check_compatible(a, b), CompatibilityError);
}

TEST(RunTrainingTest, WritesLogAndCheckpoints) {
  const auto dir = temp_dir("run");
  const auto model = small_model(16);
  auto cfg = short_schedule(2);
  const std::vector<MixPair> val = {fixed_pair(600, 30)};
  const auto result = run_training(model, cfg, constant_sampler(fixed_pair(600, 31)), val, dir);
  EXPECT_EQ(result.epoch_losses.size(), 2u);
  EXPECT_EQ(result.validation_scores.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "best.ckpt"));
  EXPECT_TRUE(fs::exists(dir / "last.ckpt"));
  std::ifstream log(dir / "train.log");
  std::string header, line;
  std::getline(log, header);
  EXPECT_EQ(header, "epoch,step,loss,lr");
  std::size_t lines = 0;
  while (std::getline(log, line)) ++lines;
  EXPECT_EQ(lines, 4u);
  const auto best = load_checkpoint(dir / "best.ckpt");
  EXPECT_EQ(best.epoch, result.best_epoch);
  EXPECT_EQ(best.best_validation_score, result.best_score);
  EXPECT_TRUE(load_checkpoint(dir / "last.ckpt").adam.has_value());
}

}  // namespace
}  // namespace arn
