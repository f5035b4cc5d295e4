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

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fcrn/tensor.hpp"

namespace fcrn {

class Rng;

enum class LayerKind { conv, pool, batchnorm, relu, blstm, dense, softmax };

struct Extent {
  int h = 1;
  int w = 1;
  friend bool operator==(const Extent&, const Extent&) = default;
};

// One row of an architecture table. kernel/stride/padding are used by conv
// and pool; units is the output channel count (conv), cells per direction
// (blstm) or output width (dense).
struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  Extent kernel{1, 1};
  Extent stride{1, 1};
  Extent padding{0, 0};
  int units = 0;

  static LayerSpec conv(Extent kernel, Extent stride, Extent padding, int channels);
  static LayerSpec pool(Extent kernel, Extent stride);
  static LayerSpec batchnorm();
  static LayerSpec relu();
  static LayerSpec blstm(int cells);
  static LayerSpec dense(int units);
  static LayerSpec softmax();

  bool spatial() const noexcept { return kind == LayerKind::conv || kind == LayerKind::pool; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

std::string to_string(LayerKind kind);
// "conv k=3x3 s=1x1 p=0x1 n=64", "pool k=2x2 s=2x2", "blstm n=64", "softmax", ...
std::string to_string(const LayerSpec& spec);
LayerSpec parse_layer_spec(const std::string& text);

enum class Mode { train, eval };

// Per-call activations a layer keeps for its backward pass.
struct LayerCache {
  virtual ~LayerCache() = default;
};

struct ParamBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t size() const noexcept { return static_cast<std::size_t>(rows) * cols; }
};

// Stateless layer; parameters, buffers and caches live outside so a frozen
// model can serve concurrent forward passes.
class Layer {
 public:
  explicit Layer(LayerSpec spec) : spec_(spec) {}
  virtual ~Layer() = default;

  const LayerSpec& spec() const noexcept { return spec_; }

  // Throws ConfigError for inputs the layer cannot consume.
  virtual Shape output_shape(const Shape& in) const = 0;

  virtual std::vector<ParamBlock> param_blocks() const { return {}; }
  virtual std::size_t num_buffers() const { return 0; }
  std::size_t num_params() const;

  virtual void init(std::span<double> params, std::span<double> buffers, Rng& rng) const;

  // A cache is written only when `cache` is non-null.
  virtual Blob forward(const Blob& in, std::span<const double> params,
                       std::span<const double> buffers, Mode mode,
                       std::unique_ptr<LayerCache>* cache) const = 0;

  // Adds parameter gradients into grad_params and returns dLoss/dInput.
  virtual Blob backward(const Blob& grad_out, const LayerCache* cache,
                        std::span<const double> params, std::span<double> grad_params) const = 0;

  // Folds batch statistics recorded in a train-mode cache into buffers.
  virtual void update_buffers(const LayerCache&, std::span<double>, double) const {}

 private:
  LayerSpec spec_;
};

// in_channels is the channel (feature) count of the layer input.
std::unique_ptr<Layer> make_layer(const LayerSpec& spec, int in_channels);

}  // namespace fcrn
