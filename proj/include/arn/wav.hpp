// arn/wav.hpp

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

// RIFF/WAVE reading and writing for mono 16 kHz audio.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace arn {

enum class WavEncoding { Pcm16, Float32 };

struct WavFile {
  std::uint32_t sample_rate = 16000;
  std::uint16_t channels = 1;
  WavEncoding encoding = WavEncoding::Float32;
  std::vector<float> samples;
};

/// Parses a WAV image. Chunks other than `fmt ` and `data` are skipped and
/// the two may appear in either order. Throws FormatError on anything that
/// is not mono 16 kHz PCM16 or Float32.
WavFile parse_wav(std::span<const std::uint8_t> bytes);
WavFile read_wav(const std::filesystem::path& path);

/// Canonical 44-byte-header image. PCM16 samples are round(x * 32768)
/// clamped to [-32768, 32767].
std::vector<std::uint8_t> encode_wav(std::span<const float> samples, WavEncoding encoding,
                                     std::uint32_t sample_rate = 16000);
void write_wav(const std::filesystem::path& path, std::span<const float> samples,
               WavEncoding encoding = WavEncoding::Float32);

std::int16_t to_pcm16(float x);
inline float from_pcm16(std::int16_t v) { return static_cast<float>(v) / 32768.0f; }

}  // namespace arn
