// src/checkpoint.cpp

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

#include "arn/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>
#include <vector>

#include "arn/error.hpp"

namespace arn {

namespace {

const char* kMagic = "ARN-CHECKPOINT";

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigurationError("not a number: '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw ConfigurationError("not a nonnegative integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigurationError("not a boolean: '" + s + "'");
}

Shape parse_shape(const std::string& s) {
  Shape shape;
  std::istringstream in(s);
  std::string dim;
  while (std::getline(in, dim, ',')) shape.push_back(parse_count(dim));
  return shape;
}

std::string shape_field(const Shape& shape) {
  std::string out;
  for (std::size_t i = 0; i < shape.size(); ++i) out += (i ? "," : "") + std::to_string(shape[i]);
  return out;
}

struct DirectoryEntry {
  std::string name;
  Shape shape;
  std::size_t offset = 0;
  std::size_t count = 0;
};

void append_values(std::string& payload, std::span<const float> values) {
  for (float v : values) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) payload.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

void read_values(const std::string& payload, const DirectoryEntry& e, std::span<float> out) {
  for (std::size_t i = 0; i < e.count; ++i) {
    const auto* p = reinterpret_cast<const unsigned char*>(payload.data() + e.offset + 4 * i);
    const std::uint32_t bits = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
                               std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
    out[i] = std::bit_cast<float>(bits);
  }
}

std::vector<std::pair<std::string, Tensor<float>>> all_tensors(const Checkpoint& c) {
  auto out = c.params.named_parameters();
  for (auto& b : c.params.named_buffers()) out.push_back(std::move(b));
  return out;
}

}  // namespace

std::map<std::string, std::string> config_fields(const ArnConfig& cfg) {
  return {{"hidden", std::to_string(cfg.hidden)},
          {"input_frame", std::to_string(cfg.input_frame)},
          {"output_frame", std::to_string(cfg.output_frame)},
          {"shift", std::to_string(cfg.shift)},
          {"num_blocks", std::to_string(cfg.num_blocks)},
          {"causal", cfg.causal ? "true" : "false"},
          {"dropout", format_double(cfg.dropout)},
          {"layer_norm_eps", format_double(cfg.layer_norm_eps)}};
}

void apply_config_field(ArnConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "hidden") cfg.hidden = parse_count(value);
  else if (key == "input_frame") cfg.input_frame = parse_count(value);
  else if (key == "output_frame") cfg.output_frame = parse_count(value);
  else if (key == "shift") cfg.shift = parse_count(value);
  else if (key == "num_blocks") cfg.num_blocks = parse_count(value);
  else if (key == "causal") cfg.causal = parse_bool(value);
  else if (key == "dropout") cfg.dropout = parse_double(value);
  else if (key == "layer_norm_eps") cfg.layer_norm_eps = parse_double(value);
  else throw ConfigurationError("unknown model setting '" + key + "'");
}

void check_compatible(const ArnConfig& expected, const ArnConfig& actual) {
  const auto a = config_fields(expected), b = config_fields(actual);
  for (const char* key : {"hidden", "input_frame", "output_frame", "shift", "num_blocks", "causal"})
    if (a.at(key) != b.at(key))
      throw CompatibilityError(std::string("model mismatch: ") + key + " is " + b.at(key) +
                               ", expected " + a.at(key));
}

void save_checkpoint(Checkpoint& c, const std::filesystem::path& path) {
  c.config.validate();
  c.params.refresh_v_gate_caches();
  std::ostringstream header;
  header << kMagic << "\nformat_version=" << kCheckpointFormatVersion << "\n[config]\n";
  for (const auto& [k, v] : config_fields(c.config)) header << k << '=' << v << '\n';
  header << "[train]\nepoch=" << c.epoch
         << "\nbest_validation_score=" << format_double(c.best_validation_score) << '\n';
  if (c.adam) header << "adam_step_count=" << c.adam->step_count << '\n';
  header << "[tensors]\n";

  std::string payload;
  auto add = [&](const std::string& name, const Shape& shape, std::span<const float> values) {
    header << name << '\t' << shape_field(shape) << '\t' << payload.size() << '\t' << values.size()
           << '\n';
    append_values(payload, values);
  };
  for (const auto& [name, t] : all_tensors(c)) add(name, t.shape(), t.data());
  if (c.adam) {
    const auto named = c.params.named_parameters();
    if (c.adam->m.size() != named.size() || c.adam->v.size() != named.size())
      throw DimensionError("checkpoint: optimizer state does not match the parameters");
    for (std::size_t i = 0; i < named.size(); ++i) {
      add("adam.m." + named[i].first, named[i].second.shape(), c.adam->m[i]);
      add("adam.v." + named[i].first, named[i].second.shape(), c.adam->v[i]);
    }
  }
  header << "[end]\n";

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp.string());
    const auto h = header.str();
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw CheckpointError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  // Header: everything up to and including the "[end]" line.
  const std::string end_marker = "\n[end]\n";
  const auto end_pos = file.find(end_marker);
  if (file.rfind(kMagic, 0) != 0 || end_pos == std::string::npos)
    throw CorruptHeaderError(path.string() + ": not an ARN checkpoint");
  std::istringstream header(file.substr(0, end_pos + 1));
  const std::string payload = file.substr(end_pos + end_marker.size());

  Checkpoint c;
  std::vector<DirectoryEntry> directory;
  std::optional<std::uint64_t> adam_steps;
  std::string line, section;
  bool have_version = false;
  std::getline(header, line);  // magic
  try {
    while (std::getline(header, line)) {
      if (line.empty()) continue;
      if (line.front() == '[') {
        section = line;
        continue;
      }
      if (section == "[tensors]") {
        std::istringstream fields(line);
        DirectoryEntry e;
        std::string shape, offset, count;
        if (!std::getline(fields, e.name, '\t') || !std::getline(fields, shape, '\t') ||
            !std::getline(fields, offset, '\t') || !std::getline(fields, count))
          throw CorruptHeaderError("bad tensor entry '" + line + "'");
        e.shape = parse_shape(shape);
        e.offset = parse_count(offset);
        e.count = parse_count(count);
        if (shape_numel(e.shape) != e.count)
          throw CorruptHeaderError("tensor " + e.name + ": shape and count disagree");
        directory.push_back(std::move(e));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw CorruptHeaderError("bad header line '" + line + "'");
      const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
      if (section.empty() && key == "format_version") {
        c.format_version = static_cast<int>(parse_count(value));
        have_version = true;
      } else if (section == "[config]") {
        apply_config_field(c.config, key, value);
      } else if (section == "[train]" && key == "epoch") {
        c.epoch = parse_count(value);
      } else if (section == "[train]" && key == "best_validation_score") {
        c.best_validation_score = parse_double(value);
      } else if (section == "[train]" && key == "adam_step_count") {
        adam_steps = parse_count(value);
      } else {
        throw CorruptHeaderError("unexpected header key '" + key + "'");
      }
    }
    c.config.validate();
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CorruptHeaderError(path.string() + ": " + e.what());
  }
  if (!have_version) throw CorruptHeaderError(path.string() + ": missing format_version");
  if (c.format_version != kCheckpointFormatVersion)
    throw CompatibilityError(path.string() + ": unsupported checkpoint format version " +
                             std::to_string(c.format_version));

  for (const auto& e : directory)
    if (e.offset + 4 * e.count > payload.size())
      throw TruncatedPayloadError(path.string() + ": payload ends before tensor " + e.name);

  std::map<std::string, const DirectoryEntry*> by_name;
  for (const auto& e : directory)
    if (!by_name.emplace(e.name, &e).second)
      throw CorruptHeaderError(path.string() + ": duplicate tensor " + e.name);
  auto take = [&](const std::string& name, const Shape& shape, std::span<float> out) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw ShapeMismatchError(path.string() + ": missing tensor " + name);
    if (it->second->shape != shape)
      throw ShapeMismatchError(path.string() + ": tensor " + name + " has shape " +
                               shape_str(it->second->shape) + ", config implies " +
                               shape_str(shape));
    read_values(payload, *it->second, out);
    by_name.erase(it);
  };

  c.params = ModelParams<float>::zeros(c.config);
  for (auto& [name, t] : all_tensors(c)) take(name, t.shape(), t.data());
  if (adam_steps) {
    const auto named = c.params.named_parameters();
    AdamState<float> adam = AdamState<float>::for_params(c.params.parameters());
    adam.step_count = *adam_steps;
    for (std::size_t i = 0; i < named.size(); ++i) {
      take("adam.m." + named[i].first, named[i].second.shape(), adam.m[i]);
      take("adam.v." + named[i].first, named[i].second.shape(), adam.v[i]);
    }
    c.adam = std::move(adam);
  }
  if (!by_name.empty())
    throw ShapeMismatchError(path.string() + ": unexpected tensor " + by_name.begin()->first);
  return c;
}

}  // namespace arn
