/* Copyright (c) 2026 The FCRN Toolkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include "fcrn/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "fcrn/error.hpp"

namespace fcrn {

namespace {

constexpr const char* kMagic = "fcrn-checkpoint";
constexpr int kVersion = 1;

void write_le(std::ostream& out, std::span<const double> values) {
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(bytes, 8);
  }
}

void read_le(std::istream& in, std::span<double> values) {
  for (double& v : values) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ParseError("parameter blob is truncated", 0);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    v = std::bit_cast<double>(bits);
  }
}

std::filesystem::path blob_path(const std::filesystem::path& manifest) {
  auto p = manifest;
  p += ".bin";
  return p;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model, const CheckpointMeta& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << kMagic << ' ' << kVersion << '\n';
  out << "alphabet";
  for (const auto& s : meta.alphabet) out << ' ' << s;
  out << '\n';
  out << "signature_level " << meta.signature_level << '\n';
  out << "window_radius " << meta.window_radius << '\n';
  out << "height " << meta.height << '\n';
  out << "input_channels " << model.input_channels() << '\n';
  out << "seed " << meta.seed << '\n';
  out << "iteration " << meta.iteration << '\n';
  out << "layers " << model.architecture().size() << '\n';
  for (const auto& spec : model.architecture()) out << "layer " << to_string(spec) << '\n';
  for (std::size_t i = 0; i < model.num_layers(); ++i) {
    for (const auto& b : model.layer(i).param_blocks()) {
      out << "param " << i << ' ' << b.name << ' ' << b.rows << 'x' << b.cols << '\n';
    }
  }
  out << "params " << model.params().size() << '\n';
  out << "buffers " << model.buffers().size() << '\n';
  out << "blob " << blob_path(path).filename().string() << '\n';
  if (!out) throw Error("write failed for " + path.string());

  std::ofstream blob(blob_path(path), std::ios::binary);
  if (!blob) throw Error("cannot write parameter blob " + blob_path(path).string());
  write_le(blob, model.params());
  write_le(blob, model.buffers());
  if (!blob) throw Error("write failed for " + blob_path(path).string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  CheckpointMeta meta;
  std::vector<LayerSpec> layers;
  int input_channels = 0;
  std::size_t n_params = 0, n_buffers = 0, n_layers = 0;
  std::string blob_name;
  std::string line;
  std::size_t line_no = 0;
  bool saw_magic = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (!saw_magic) {
      int version = 0;
      if (key != kMagic || !(ls >> version) || version != kVersion) {
        throw ParseError("not an fcrn checkpoint manifest", line_no);
      }
      saw_magic = true;
      continue;
    }
    auto need = [&](auto& value) {
      if (!(ls >> value)) throw ParseError("missing value for '" + key + "'", line_no);
    };
    if (key == "alphabet") {
      std::string s;
      while (ls >> s) meta.alphabet.push_back(s);
    } else if (key == "signature_level") need(meta.signature_level);
    else if (key == "window_radius") need(meta.window_radius);
    else if (key == "height") need(meta.height);
    else if (key == "input_channels") need(input_channels);
    else if (key == "seed") need(meta.seed);
    else if (key == "iteration") need(meta.iteration);
    else if (key == "layers") need(n_layers);
    else if (key == "layer") {
      std::string rest;
      std::getline(ls, rest);
      try {
        layers.push_back(parse_layer_spec(rest));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
      }
    } else if (key == "param") {
      // Informational; shapes are re-derived from the layer specs.
    } else if (key == "params") need(n_params);
    else if (key == "buffers") need(n_buffers);
    else if (key == "blob") need(blob_name);
    else throw ParseError("unknown manifest key '" + key + "'", line_no);
  }
  if (!saw_magic) throw ParseError("empty checkpoint manifest", 0);
  if (layers.size() != n_layers) throw ParseError("layer count does not match 'layers' entry", 0);

  Model model(layers, input_channels, meta.seed);
  if (model.params().size() != n_params || model.buffers().size() != n_buffers) {
    throw ParseError("parameter counts do not match the layer specs", 0);
  }
  const auto blob_file = blob_name.empty() ? blob_path(path) : path.parent_path() / blob_name;
  std::ifstream blob(blob_file, std::ios::binary);
  if (!blob) throw Error("cannot open parameter blob " + blob_file.string());
  read_le(blob, model.params());
  read_le(blob, model.buffers());
  if (blob.peek() != std::char_traits<char>::eof()) throw ParseError("parameter blob has trailing bytes", 0);
  return {std::move(model), std::move(meta)};
}

}  // namespace fcrn
