// tests/test_audio.cpp

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

#include "arn/error.hpp"
#include "arn/losses.hpp"
#include "arn/mixing.hpp"
#include "arn/wav.hpp"

namespace arn {
namespace {

namespace fs = std::filesystem;
using Bytes = std::vector<std::uint8_t>;

AudioBuffer noise_signal(std::size_t n, std::uint64_t seed, float amp = 0.3f) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> dist(0.0f, amp);
  AudioBuffer x(n);
  for (auto& v : x) v = dist(rng);
  return x;
}

void append_chunk(Bytes& out, const char* tag, const Bytes& body) {
  out.insert(out.end(), tag, tag + 4);
  const auto size = static_cast<std::uint32_t>(body.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(size >> (8 * i)));
  out.insert(out.end(), body.begin(), body.end());
  if (body.size() % 2) out.push_back(0);
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("arn_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(WavTest, Float32RoundTripIsBitIdentical) {
  auto x = noise_signal(1001, 1);
  x[3] = -0.0f;
  x[4] = 7.5f;
  const auto wav = parse_wav(encode_wav(x, WavEncoding::Float32));
  EXPECT_EQ(wav.encoding, WavEncoding::Float32);
  ASSERT_EQ(wav.samples.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_EQ(std::bit_cast<std::uint32_t>(wav.samples[i]), std::bit_cast<std::uint32_t>(x[i]));
}

TEST(WavTest, Pcm16RoundTripIsValueIdentical) {
  std::vector<float> x;
  for (int v : {-32768, -32767, -1, 0, 1, 12345, 32767}) x.push_back(from_pcm16(static_cast<std::int16_t>(v)));
  const auto once = parse_wav(encode_wav(x, WavEncoding::Pcm16));
  EXPECT_EQ(once.encoding, WavEncoding::Pcm16);
  EXPECT_EQ(once.samples, x);
  const auto twice = parse_wav(encode_wav(once.samples, WavEncoding::Pcm16));
  EXPECT_EQ(twice.samples, x);
}

TEST(WavTest, Pcm16Clamps) {
  EXPECT_EQ(to_pcm16(1.0f), 32767);
  EXPECT_EQ(to_pcm16(5.0f), 32767);
  EXPECT_EQ(to_pcm16(-1.0f), -32768);
  EXPECT_EQ(to_pcm16(-9.0f), -32768);
  EXPECT_EQ(to_pcm16(0.5f), 16384);
  EXPECT_EQ(to_pcm16(std::numeric_limits<float>::quiet_NaN()), -32768);
}

TEST(WavTest, UnknownChunksAndOrderTolerated) {
  const std::vector<float> x = {0.25f, -0.5f, 0.125f};
  const auto canonical = encode_wav(x, WavEncoding::Float32);
  Bytes fmt(canonical.begin() + 20, canonical.begin() + 36);
  Bytes data(canonical.begin() + 44, canonical.end());
  Bytes body;
  body.insert(body.end(), {'W', 'A', 'V', 'E'});
  append_chunk(body, "LIST", Bytes{'a', 'b', 'c'});  // odd size, padded
  append_chunk(body, "data", data);
  append_chunk(body, "junk", Bytes(10, 7));
  append_chunk(body, "fmt ", fmt);
  Bytes file;
  append_chunk(file, "RIFF", body);
  EXPECT_EQ(parse_wav(file).samples, x);
}

TEST(WavTest, RejectsUnsupportedInput) {
  EXPECT_THROW(parse_wav(Bytes{1, 2, 3}), FormatError);
  auto stereo = encode_wav(std::vector<float>{0, 0}, WavEncoding::Float32);
  stereo[22] = 2;
  EXPECT_THROW(parse_wav(stereo), FormatError);
  auto rate = encode_wav(std::vector<float>{0, 0}, WavEncoding::Float32, 8000);
  EXPECT_THROW(parse_wav(rate), FormatError);
  auto bits = encode_wav(std::vector<float>{0, 0}, WavEncoding::Pcm16);
  bits[34] = 8;
  EXPECT_THROW(parse_wav(bits), FormatError);
  auto truncated = encode_wav(std::vector<float>{0, 0, 0}, WavEncoding::Float32);
  truncated.resize(truncated.size() - 2);
  EXPECT_THROW(parse_wav(truncated), FormatError);
}

TEST(WavTest, FileRoundTrip) {
  const auto dir = temp_dir("wav");
  const auto x = noise_signal(500, 2);
  write_wav(dir / "a.wav", x);
  EXPECT_EQ(read_wav(dir / "a.wav").samples, x);
  EXPECT_THROW(read_wav(dir / "missing.wav"), FormatError);
}

TEST(TrimSilenceTest, ZeroPaddingRemoved) {
  const auto interior = noise_signal(12345, 3);
  AudioBuffer padded(8000, 0.0f);
  padded.insert(padded.end(), interior.begin(), interior.end());
  padded.insert(padded.end(), 8000, 0.0f);
  EXPECT_EQ(trim_silence(padded), interior);
}

TEST(TrimSilenceTest, IdentityCases) {
  const auto x = noise_signal(4000, 4);
  EXPECT_EQ(trim_silence(x), x);
  AudioBuffer quiet_edges(3200, 1e-4f);
  const auto loud = noise_signal(3000, 5);
  quiet_edges.insert(quiet_edges.end(), loud.begin(), loud.end());
  EXPECT_EQ(trim_silence(quiet_edges, -std::numeric_limits<double>::infinity()), quiet_edges);
  EXPECT_EQ(trim_silence(quiet_edges, -40.0).size(), loud.size());
  EXPECT_TRUE(trim_silence(AudioBuffer(900, 0.0f)).empty());
  EXPECT_THROW(trim_silence(AudioBuffer{}), ParameterError);
}

TEST(TrimSilenceTest, InteriorSilenceKept) {
  auto x = noise_signal(3200, 6);
  std::fill(x.begin() + 1000, x.begin() + 2000, 0.0f);
  EXPECT_EQ(trim_silence(x), x);
}

TEST(MixtureTest, GainFormula) {
  const AudioBuffer s = {1, -1, 1, -1}, n = {-1, 1, 1, -1};
  EXPECT_DOUBLE_EQ(noise_gain(s, n, 0), 1.0);
  EXPECT_NEAR(noise_gain(s, n, -5), 1.7782794100389228, 1e-12);
  EXPECT_THROW(noise_gain(AudioBuffer(4, 0.0f), n, 0), DegenerateSignalError);
  EXPECT_THROW(noise_gain(s, AudioBuffer(4, 0.0f), 0), DegenerateSignalError);
}

TEST(MixtureTest, HundredRecipesHitRequestedSnr) {
  auto speech = Corpus::from_buffers({"s0", "s1", "s2"},
                                     {noise_signal(20000, 10, 0.1f), noise_signal(70000, 11, 2.0f),
                                      noise_signal(5000, 12, 0.5f)});
  auto noise = Corpus::from_buffers({"n0", "n1"},
                                    {noise_signal(90000, 13, 1.0f), noise_signal(80000, 14, 0.01f)});
  Rng rng(99);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto r = draw_recipe(rng, speech, noise);
    const auto pair = materialize(r, speech, noise);
    ASSERT_EQ(pair.noisy.size(), r.length);
    EXPECT_LE(r.length, 64000u);
    const double measured = snr_db(std::span<const float>(pair.clean),
                                   std::span<const float>(pair.noisy));
    worst = std::max(worst, std::abs(measured - r.snr_db));
    // Mixture is RMS-normalized.
    double e = 0;
    for (float v : pair.noisy) e += static_cast<double>(v) * v;
    EXPECT_NEAR(std::sqrt(e / static_cast<double>(pair.noisy.size())), 1.0, 1e-5);
  }
  EXPECT_LT(worst, 0.01);
}

TEST(MixtureTest, RecipeDeterminesPair) {
  const auto s = noise_signal(3000, 20), n = noise_signal(4000, 21);
  MixtureRecipe r{"s", "n", 100, 700, 2500, -3, 5};
  const auto a = make_mixture(r, s, n), b = make_mixture(r, s, n);
  EXPECT_EQ(a.noisy, b.noisy);
  EXPECT_EQ(a.clean, b.clean);
  r.noise_offset = 1600;
  EXPECT_THROW(make_mixture(r, s, n), ParameterError);
}

TEST(MixtureTest, SnrDrawsAreUniform) {
  auto speech = Corpus::from_buffers({"s"}, {noise_signal(100, 30)});
  auto noise = Corpus::from_buffers({"n"}, {noise_signal(100, 31)});
  Rng rng(7);
  const int draws = 10000;
  std::array<int, 6> counts{};
  for (int i = 0; i < draws; ++i) ++counts[draw_recipe(rng, speech, noise).snr_db + 5];
  const double expected = draws / 6.0;
  const double sigma = std::sqrt(draws * (1.0 / 6) * (5.0 / 6));
  double chi2 = 0;
  for (int c : counts) {
    EXPECT_LT(std::abs(c - expected), 3 * sigma);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 99th percentile of chi-square with 5 degrees of freedom.
  EXPECT_LT(chi2, 15.086);
}

TEST(BatchTest, DeterministicAndValid) {
  auto speech = Corpus::from_buffers({"a", "b"}, {noise_signal(70000, 40), noise_signal(30000, 41)});
  auto noise = Corpus::from_buffers({"n"}, {noise_signal(100000, 42)});
  Rng r1(5), r2(5);
  const auto b1 = sample_training_batch(r1, speech, noise, 32);
  const auto b2 = sample_training_batch(r2, speech, noise, 32);
  ASSERT_EQ(b1.size(), 32u);
  for (std::size_t i = 0; i < 32; ++i) {
    EXPECT_EQ(b1[i].noisy, b2[i].noisy);
    EXPECT_EQ(b1[i].clean, b2[i].clean);
    EXPECT_LE(b1[i].noisy.size(), 64000u);
    EXPECT_EQ(b1[i].noisy.size(), b1[i].clean.size());
    for (float v : b1[i].noisy) ASSERT_TRUE(std::isfinite(v));
  }
  EXPECT_THROW(sample_training_batch(r1, Corpus{}, noise, 1), ConfigurationError);
}

TEST(BatchTest, SilentChunksAreRedrawn) {
  AudioBuffer half_silent(2000, 0.0f);
  const auto loud = noise_signal(2000, 50);
  half_silent.insert(half_silent.end(), loud.begin(), loud.end());
  auto speech = Corpus::from_buffers({"s"}, {noise_signal(1000, 51)});
  auto noise = Corpus::from_buffers({"n"}, {half_silent});
  Rng rng(3);
  const auto batch = sample_training_batch(rng, speech, noise, 50);
  EXPECT_EQ(batch.size(), 50u);
}

TEST(CorpusTest, IndexParseAndLoad) {
  const auto dir = temp_dir("corpus");
  fs::create_directories(dir / "speech");
  AudioBuffer padded(640, 0.0f);
  const auto voice = noise_signal(3000, 60);
  padded.insert(padded.end(), voice.begin(), voice.end());
  write_wav(dir / "speech" / "u1.wav", padded, WavEncoding::Float32);
  write_wav(dir / "speech" / "u2.wav", AudioBuffer(500, 0.0f), WavEncoding::Float32);
  {
    std::ofstream idx(dir / "speech.tsv");
    idx << "# id\tpath\tcount\n";
    idx << "u1\tspeech/u1.wav\t" << padded.size() << "\n\n";
    idx << "u2\tspeech/u2.wav\t500\n";
  }
  const auto index = CorpusIndex::load(dir / "speech.tsv", CorpusKind::Speech);
  ASSERT_EQ(index.entries.size(), 2u);
  EXPECT_EQ(index.entries[0].sample_count, padded.size());
  const auto corpus = Corpus::load(index);
  ASSERT_EQ(corpus.size(), 1u);  // silent u2 dropped
  EXPECT_EQ(corpus.audio("u1"), voice);

  std::istringstream bad("u1\tspeech/u1.wav\tmany\n");
  EXPECT_THROW(CorpusIndex::parse(bad, CorpusKind::Speech), FormatError);
  std::istringstream wrong_count("u1\tspeech/u1.wav\t7\n");
  EXPECT_THROW(Corpus::load(CorpusIndex::parse(wrong_count, CorpusKind::Speech, dir)), FormatError);
}

}  // namespace
}  // namespace arn
