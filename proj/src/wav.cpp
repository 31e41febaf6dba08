// src/wav.cpp

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

#include "arn/wav.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "arn/error.hpp"

namespace arn {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

bool tag_is(const std::uint8_t* p, const char* tag) { return std::memcmp(p, tag, 4) == 0; }

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

FmtChunk parse_fmt(const std::uint8_t* p, std::uint32_t size) {
  if (size < 16) throw FormatError("wav: fmt chunk too short");
  FmtChunk f;
  f.format = read_u16(p);
  f.channels = read_u16(p + 2);
  f.sample_rate = read_u32(p + 4);
  f.bits = read_u16(p + 14);
  if (f.format == kFormatExtensible) {
    if (size < 40) throw FormatError("wav: extensible fmt chunk too short");
    // First two bytes of the subformat GUID carry the plain format code.
    f.format = read_u16(p + 24);
  }
  return f;
}

}  // namespace

std::int16_t to_pcm16(float x) {
  const double scaled = std::round(static_cast<double>(x) * 32768.0);
  if (!(scaled > -32768.0)) return -32768;  // also catches NaN
  if (scaled > 32767.0) return 32767;
  return static_cast<std::int16_t>(scaled);
}

WavFile parse_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE"))
    throw FormatError("wav: not a RIFF/WAVE file");

  const std::uint8_t* fmt_ptr = nullptr;
  std::uint32_t fmt_size = 0;
  const std::uint8_t* data_ptr = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (tag_is(chunk, "fmt ")) {
      if (size > available) throw FormatError("wav: truncated fmt chunk");
      fmt_ptr = chunk + 8;
      fmt_size = size;
    } else if (tag_is(chunk, "data")) {
      if (size > available) throw FormatError("wav: truncated data chunk");
      data_ptr = chunk + 8;
      data_size = size;
    }
    pos = body + size + (size & 1u);
  }
  if (!fmt_ptr) throw FormatError("wav: missing fmt chunk");
  if (!data_ptr) throw FormatError("wav: missing data chunk");

  const FmtChunk fmt = parse_fmt(fmt_ptr, fmt_size);
  if (fmt.channels != 1)
    throw FormatError("wav: expected mono, got " + std::to_string(fmt.channels) + " channels");
  if (fmt.sample_rate != 16000)
    throw FormatError("wav: expected 16000 Hz, got " + std::to_string(fmt.sample_rate));

  WavFile wav;
  wav.sample_rate = fmt.sample_rate;
  wav.channels = fmt.channels;
  if (fmt.format == kFormatPcm && fmt.bits == 16) {
    wav.encoding = WavEncoding::Pcm16;
    if (data_size % 2) throw FormatError("wav: odd byte count in 16-bit data");
    wav.samples.resize(data_size / 2);
    for (std::size_t i = 0; i < wav.samples.size(); ++i)
      wav.samples[i] = from_pcm16(static_cast<std::int16_t>(read_u16(data_ptr + 2 * i)));
  } else if (fmt.format == kFormatFloat && fmt.bits == 32) {
    wav.encoding = WavEncoding::Float32;
    if (data_size % 4) throw FormatError("wav: data size not a multiple of 4");
    wav.samples.resize(data_size / 4);
    for (std::size_t i = 0; i < wav.samples.size(); ++i)
      wav.samples[i] = std::bit_cast<float>(read_u32(data_ptr + 4 * i));
  } else {
    throw FormatError("wav: unsupported encoding (format " + std::to_string(fmt.format) + ", " +
                      std::to_string(fmt.bits) + " bits); need PCM16 or Float32");
  }
  return wav;
}

WavFile read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("wav: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return parse_wav(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(std::span<const float> samples, WavEncoding encoding,
                                     std::uint32_t sample_rate) {
  const bool pcm = encoding == WavEncoding::Pcm16;
  const std::uint16_t bytes_per_sample = pcm ? 2 : 4;
  const std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * bytes_per_sample);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, pcm ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, sample_rate);
  put_u32(out, sample_rate * bytes_per_sample);
  put_u16(out, bytes_per_sample);
  put_u16(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  put_tag(out, "data");
  put_u32(out, data_size);
  for (float x : samples) {
    if (pcm)
      put_u16(out, static_cast<std::uint16_t>(to_pcm16(x)));
    else
      put_u32(out, std::bit_cast<std::uint32_t>(x));
  }
  return out;
}

void write_wav(const std::filesystem::path& path, std::span<const float> samples,
               WavEncoding encoding) {
  const auto bytes = encode_wav(samples, encoding);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("wav: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("wav: write failed for " + path.string());
}

}  // namespace arn
