// arn/mixing.hpp

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

// Online mixing of speech and noise into (noisy, clean) training pairs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "arn/dsp.hpp"
#include "arn/ops.hpp"

namespace arn {

struct MixtureRecipe {
  std::string speech_id;
  std::string noise_id;
  std::size_t speech_offset = 0;
  std::size_t noise_offset = 0;
  std::size_t length = 0;  // samples taken from each source
  int snr_db = 0;
  std::uint64_t seed = 0;  // draw that produced this recipe

  bool operator==(const MixtureRecipe&) const = default;
};

enum class CorpusKind { Speech, Noise };

struct CorpusEntry {
  std::string id;
  std::filesystem::path path;  // relative to the index file
  std::size_t sample_count = 0;
};

struct CorpusIndex {
  std::vector<CorpusEntry> entries;
  CorpusKind kind = CorpusKind::Speech;
  std::filesystem::path base_dir;

  /// One entry per line: `<id>\t<relative path>\t<sample_count>`. Blank
  /// lines and lines starting with '#' are ignored.
  static CorpusIndex parse(std::istream& in, CorpusKind kind, std::filesystem::path base_dir = {});
  static CorpusIndex load(const std::filesystem::path& path, CorpusKind kind);
};

/// Audio held in memory, keyed by corpus id.
class Corpus {
 public:
  Corpus() = default;
  /// Reads every entry. Speech is silence-trimmed; fully silent entries are
  /// dropped. Throws FormatError if a file disagrees with its sample count.
  static Corpus load(const CorpusIndex& index);
  static Corpus from_buffers(std::vector<std::string> ids, std::vector<AudioBuffer> audio);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  const AudioBuffer& audio(std::size_t i) const { return audio_[i]; }
  const AudioBuffer& audio(const std::string& id) const;

 private:
  std::vector<std::string> ids_;
  std::vector<AudioBuffer> audio_;
};

struct MixPair {
  AudioBuffer noisy;
  AudioBuffer clean;
};

struct MixingConfig {
  std::size_t max_len = 64000;  // 4 s at 16 kHz
  std::vector<int> snr_set = {-5, -4, -3, -2, -1, 0};
  double trim_threshold_db = -40.0;
};

/// Removes leading and trailing 20 ms windows whose RMS is below
/// `threshold_db` relative to the loudest window, then any exact zeros left
/// at the edges. Returns an empty buffer for an all-silent input.
AudioBuffer trim_silence(std::span<const float> x, double threshold_db = -40.0,
                         std::size_t window = 320);

/// Scales the noise chunk to the recipe SNR, adds it to the speech chunk and
/// RMS-normalizes the mixture to 1 with the same gain on the clean signal.
MixPair make_mixture(const MixtureRecipe& recipe, std::span<const float> speech,
                     std::span<const float> noise);

/// Noise gain that puts `noise` at `snr_db` below `speech`.
double noise_gain(std::span<const float> speech, std::span<const float> noise, double snr_db);

MixtureRecipe draw_recipe(Rng& rng, const Corpus& speech, const Corpus& noise,
                          const MixingConfig& cfg = {});

/// Deterministic in the RNG state. Recipes whose chunks turn out silent are
/// redrawn.
std::vector<MixPair> sample_training_batch(Rng& rng, const Corpus& speech, const Corpus& noise,
                                           std::size_t batch, const MixingConfig& cfg = {});

MixPair materialize(const MixtureRecipe& recipe, const Corpus& speech, const Corpus& noise);

}  // namespace arn
