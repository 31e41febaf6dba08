// src/mixing.cpp

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

#include "arn/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "arn/error.hpp"
#include "arn/wav.hpp"

namespace arn {

namespace {

double energy(std::span<const float> x) {
  double acc = 0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return acc;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

constexpr int kMaxRedraws = 100;

}  // namespace

CorpusIndex CorpusIndex::parse(std::istream& in, CorpusKind kind, std::filesystem::path base_dir) {
  CorpusIndex index;
  index.kind = kind;
  index.base_dir = std::move(base_dir);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    CorpusEntry e;
    std::string path, count;
    if (!std::getline(fields, e.id, '\t') || !std::getline(fields, path, '\t') ||
        !std::getline(fields, count) || e.id.empty() || path.empty())
      throw FormatError("corpus index line " + std::to_string(lineno) +
                        ": expected <id>\\t<path>\\t<sample_count>");
    try {
      std::size_t used = 0;
      e.sample_count = std::stoull(count, &used);
      if (used != count.size()) throw std::invalid_argument(count);
    } catch (const std::exception&) {
      throw FormatError("corpus index line " + std::to_string(lineno) + ": bad sample count '" +
                        count + "'");
    }
    e.path = path;
    index.entries.push_back(std::move(e));
  }
  return index;
}

CorpusIndex CorpusIndex::load(const std::filesystem::path& path, CorpusKind kind) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open corpus index " + path.string());
  return parse(in, kind, path.parent_path());
}

Corpus Corpus::load(const CorpusIndex& index) {
  Corpus corpus;
  for (const auto& e : index.entries) {
    auto wav = read_wav(index.base_dir / e.path);
    if (wav.samples.size() != e.sample_count)
      throw FormatError("corpus entry " + e.id + ": index says " + std::to_string(e.sample_count) +
                        " samples, file has " + std::to_string(wav.samples.size()));
    AudioBuffer audio = index.kind == CorpusKind::Speech ? trim_silence(wav.samples)
                                                         : std::move(wav.samples);
    if (audio.empty() || energy(audio) == 0.0) continue;
    corpus.ids_.push_back(e.id);
    corpus.audio_.push_back(std::move(audio));
  }
  return corpus;
}

Corpus Corpus::from_buffers(std::vector<std::string> ids, std::vector<AudioBuffer> audio) {
  if (ids.size() != audio.size()) throw DimensionError("corpus: ids and buffers differ in count");
  Corpus corpus;
  corpus.ids_ = std::move(ids);
  corpus.audio_ = std::move(audio);
  return corpus;
}

const AudioBuffer& Corpus::audio(const std::string& id) const {
  const auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) throw ConfigurationError("corpus has no entry '" + id + "'");
  return audio_[static_cast<std::size_t>(it - ids_.begin())];
}

AudioBuffer trim_silence(std::span<const float> x, double threshold_db, std::size_t window) {
  if (x.empty()) throw ParameterError("trim_silence: empty signal");
  if (window == 0) throw ParameterError("trim_silence: window must be positive");
  if (threshold_db == -std::numeric_limits<double>::infinity())
    return AudioBuffer(x.begin(), x.end());

  const std::size_t count = (x.size() + window - 1) / window;
  std::vector<double> window_rms(count);
  double peak = 0;
  for (std::size_t w = 0; w < count; ++w) {
    const auto chunk = x.subspan(w * window, std::min(window, x.size() - w * window));
    window_rms[w] = std::sqrt(energy(chunk) / static_cast<double>(chunk.size()));
    peak = std::max(peak, window_rms[w]);
  }
  if (peak == 0.0) return {};
  const double floor = peak * std::pow(10.0, threshold_db / 20.0);

  std::size_t first = 0;
  while (window_rms[first] < floor) ++first;
  std::size_t last = count - 1;
  while (window_rms[last] < floor) --last;
  std::size_t begin = first * window;
  std::size_t end = std::min(x.size(), (last + 1) * window);
  while (begin < end && x[begin] == 0.0f) ++begin;
  while (end > begin && x[end - 1] == 0.0f) --end;
  return AudioBuffer(x.begin() + static_cast<std::ptrdiff_t>(begin),
                     x.begin() + static_cast<std::ptrdiff_t>(end));
}

double noise_gain(std::span<const float> speech, std::span<const float> noise, double snr_db) {
  const double es = energy(speech), en = energy(noise);
  if (es == 0.0) throw DegenerateSignalError("mixture: speech chunk is silent");
  if (en == 0.0) throw DegenerateSignalError("mixture: noise chunk is silent");
  const double rms_s = std::sqrt(es / static_cast<double>(speech.size()));
  const double rms_n = std::sqrt(en / static_cast<double>(noise.size()));
  return rms_s / rms_n * std::pow(10.0, -snr_db / 20.0);
}

MixPair make_mixture(const MixtureRecipe& r, std::span<const float> speech,
                     std::span<const float> noise) {
  if (r.length == 0) throw ParameterError("mixture: zero length");
  if (r.speech_offset + r.length > speech.size())
    throw ParameterError("mixture: speech chunk [" + std::to_string(r.speech_offset) + ", +" +
                         std::to_string(r.length) + ") exceeds " + std::to_string(speech.size()) +
                         " samples");
  if (r.noise_offset + r.length > noise.size())
    throw ParameterError("mixture: noise chunk [" + std::to_string(r.noise_offset) + ", +" +
                         std::to_string(r.length) + ") exceeds " + std::to_string(noise.size()) +
                         " samples");
  const auto s = speech.subspan(r.speech_offset, r.length);
  const auto n = noise.subspan(r.noise_offset, r.length);
  const double g = noise_gain(s, n, r.snr_db);

  std::vector<double> x(r.length);
  double ex = 0;
  for (std::size_t i = 0; i < r.length; ++i) {
    x[i] = static_cast<double>(s[i]) + g * n[i];
    ex += x[i] * x[i];
  }
  if (ex == 0.0) throw DegenerateSignalError("mixture: speech and noise cancel");
  const double norm = 1.0 / std::sqrt(ex / static_cast<double>(r.length));
  MixPair pair;
  pair.noisy.resize(r.length);
  pair.clean.resize(r.length);
  for (std::size_t i = 0; i < r.length; ++i) {
    pair.noisy[i] = static_cast<float>(norm * x[i]);
    pair.clean[i] = static_cast<float>(norm * s[i]);
  }
  return pair;
}

MixtureRecipe draw_recipe(Rng& rng, const Corpus& speech, const Corpus& noise,
                          const MixingConfig& cfg) {
  if (speech.empty()) throw ConfigurationError("speech corpus is empty");
  if (noise.empty()) throw ConfigurationError("noise corpus is empty");
  if (cfg.snr_set.empty()) throw ConfigurationError("mixing: empty SNR set");
  MixtureRecipe r;
  r.seed = rng();
  Rng draw(r.seed);
  const std::size_t si = uniform_index(draw, speech.size());
  const std::size_t ni = uniform_index(draw, noise.size());
  const auto& s = speech.audio(si);
  const auto& n = noise.audio(ni);
  r.speech_id = speech.id(si);
  r.noise_id = noise.id(ni);
  r.length = std::min({cfg.max_len, s.size(), n.size()});
  r.speech_offset = uniform_index(draw, s.size() - r.length + 1);
  r.noise_offset = uniform_index(draw, n.size() - r.length + 1);
  r.snr_db = cfg.snr_set[uniform_index(draw, cfg.snr_set.size())];
  return r;
}

MixPair materialize(const MixtureRecipe& recipe, const Corpus& speech, const Corpus& noise) {
  return make_mixture(recipe, speech.audio(recipe.speech_id), noise.audio(recipe.noise_id));
}

std::vector<MixPair> sample_training_batch(Rng& rng, const Corpus& speech, const Corpus& noise,
                                           std::size_t batch, const MixingConfig& cfg) {
  std::vector<MixPair> out;
  out.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    for (int attempt = 0;; ++attempt) {
      const auto recipe = draw_recipe(rng, speech, noise, cfg);
      try {
        out.push_back(materialize(recipe, speech, noise));
        break;
      } catch (const DegenerateSignalError&) {
        if (attempt + 1 == kMaxRedraws)
          throw ConfigurationError("mixing: could not draw a non-silent mixture");
      }
    }
  }
  return out;
}

}  // namespace arn
