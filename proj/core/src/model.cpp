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

#include "fcrn/model.hpp"

#include <algorithm>
#include <cmath>

#include "fcrn/error.hpp"
#include "fcrn/synth.hpp"

namespace fcrn {

ArchitectureConfig architecture_preset(std::string_view name) {
  ArchitectureConfig c;
  c.preset = std::string(name);
  if (name == "full") {
    c.height = 128;
    c.blocks = 4;
    c.conv_channels = {64, 128, 256, 256, 512, 512};
    c.batchnorm_layers = 4;
    c.blstm_cells = 1024;
    c.blstm_layers = 3;
    c.hidden_dense = {2048, 2048};
  } else if (name == "desk") {
    // Defaults of the struct.
  } else if (name == "compact") {
    c.height = 32;
    c.blocks = 2;
    c.conv_channels = {16, 32, 48, 64};
    c.batchnorm_layers = 4;
    c.blstm_cells = 48;
    c.blstm_layers = 2;
  } else if (name == "micro") {
    c.height = 16;
    c.blocks = 1;
    c.conv_channels = {4, 6, 6};
    c.batchnorm_layers = 2;
    c.blstm_cells = 6;
    c.blstm_layers = 1;
  } else {
    throw ConfigError("unknown architecture preset '" + std::string(name) + "'");
  }
  return c;
}

std::vector<LayerSpec> build_architecture(const ArchitectureConfig& config, int num_labels) {
  if (config.blocks < 0) throw ConfigError("block count must be non-negative");
  const int convs = config.blocks + 2;
  if (static_cast<int>(config.conv_channels.size()) != convs) {
    throw ConfigError("expected " + std::to_string(convs) + " conv channel counts, got " +
                      std::to_string(config.conv_channels.size()));
  }
  if (config.batchnorm_layers < 0 || config.batchnorm_layers > convs) {
    throw ConfigError("batchnorm layer count out of range");
  }
  if (config.blstm_layers < 0 || num_labels < 2) throw ConfigError("invalid recurrent head");

  std::vector<LayerSpec> chain;
  int conv_index = 0;
  auto add_conv = [&](Extent k, Extent s, Extent p) {
    chain.push_back(LayerSpec::conv(k, s, p, config.conv_channels[conv_index]));
    if (conv_index >= convs - config.batchnorm_layers) chain.push_back(LayerSpec::batchnorm());
    chain.push_back(LayerSpec::relu());
    ++conv_index;
  };
  for (int b = 0; b < config.blocks; ++b) {
    add_conv({3, 3}, {1, 1}, {0, 1});
    chain.push_back(LayerSpec::pool({2, 2}, {2, 2}));
  }
  add_conv({3, 1}, {3, 1}, {0, 0});
  add_conv({2, 2}, {1, 1}, {0, 0});
  for (int i = 0; i < config.blstm_layers; ++i) chain.push_back(LayerSpec::blstm(config.blstm_cells));
  for (int units : config.hidden_dense) chain.push_back(LayerSpec::dense(units));
  chain.push_back(LayerSpec::dense(num_labels));
  chain.push_back(LayerSpec::softmax());
  return chain;
}

Model::Model(std::vector<LayerSpec> architecture, int input_channels, std::uint64_t seed)
    : architecture_(std::move(architecture)), input_channels_(input_channels), seed_(seed) {
  if (architecture_.empty()) throw ConfigError("empty architecture");
  int channels = input_channels;
  std::size_t n_params = 0, n_buffers = 0;
  for (const auto& spec : architecture_) {
    auto layer = make_layer(spec, channels);
    param_offsets_.push_back(n_params);
    buffer_offsets_.push_back(n_buffers);
    n_params += layer->num_params();
    n_buffers += layer->num_buffers();
    switch (spec.kind) {
      case LayerKind::conv:
      case LayerKind::dense: channels = spec.units; break;
      case LayerKind::blstm: channels = 2 * spec.units; break;
      default: break;
    }
    layers_.push_back(std::move(layer));
  }
  param_offsets_.push_back(n_params);
  buffer_offsets_.push_back(n_buffers);
  output_channels_ = channels;
  params_.assign(n_params, 0.0);
  buffers_.assign(n_buffers, 0.0);

  Rng rng(seed);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto p = std::span<double>(params_).subspan(param_offsets_[i], param_offsets_[i + 1] - param_offsets_[i]);
    auto b = std::span<double>(buffers_).subspan(buffer_offsets_[i], buffer_offsets_[i + 1] - buffer_offsets_[i]);
    layers_[i]->init(p, b, rng);
  }
}

std::span<const double> Model::layer_params(std::size_t i) const {
  return std::span<const double>(params_).subspan(param_offsets_.at(i), param_offsets_.at(i + 1) - param_offsets_[i]);
}

std::span<const double> Model::layer_buffers(std::size_t i) const {
  return std::span<const double>(buffers_).subspan(buffer_offsets_.at(i), buffer_offsets_.at(i + 1) - buffer_offsets_[i]);
}

Blob Model::forward_blob(const Blob& input, Mode mode, ForwardCache* cache) const {
  if (input.channels() != input_channels_) {
    throw ConfigError("model expects " + std::to_string(input_channels_) + " input channels, got " +
                      std::to_string(input.channels()));
  }
  if (cache) {
    cache->layers.clear();
    cache->layers.resize(layers_.size());
  }
  Blob current = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    current = layers_[i]->forward(current, layer_params(i), layer_buffers(i), mode,
                                  cache ? &cache->layers[i] : nullptr);
  }
  return current;
}

Eigen::VectorXd Model::backward_blob(const ForwardCache& cache, const Blob& grad_output) const {
  if (cache.layers.size() != layers_.size()) throw Error("backward called without a matching forward cache");
  Eigen::VectorXd grads = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params_.size()));
  Blob grad = grad_output;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    auto g = std::span<double>(grads.data() + param_offsets_[i], param_offsets_[i + 1] - param_offsets_[i]);
    grad = layers_[i]->backward(grad, cache.layers[i].get(), layer_params(i), g);
  }
  return grads;
}

Blob to_blob(const FeatureMaps& maps) {
  const auto v = maps.values();
  return Blob({maps.channels(), maps.height(), maps.width()}, std::vector<double>(v.begin(), v.end()));
}

PosteriorSequence Model::forward(const FeatureMaps& maps, Mode mode, ForwardCache* cache) const {
  if (architecture_.back().kind != LayerKind::softmax) throw ConfigError("architecture must end in softmax");
  const Blob out = forward_blob(to_blob(maps), mode, cache);
  return PosteriorSequence(Eigen::MatrixXd(out.frames()));
}

Eigen::VectorXd Model::backward(const ForwardCache& cache, const Eigen::MatrixXd& grad_posteriors) const {
  Blob grad({static_cast<int>(grad_posteriors.cols()), 1, static_cast<int>(grad_posteriors.rows())});
  grad.frames() = grad_posteriors;
  return backward_blob(cache, grad);
}

void Model::update_running_stats(const ForwardCache& cache, double momentum) {
  if (cache.layers.size() != layers_.size()) return;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!cache.layers[i]) continue;
    auto b = std::span<double>(buffers_).subspan(buffer_offsets_[i], buffer_offsets_[i + 1] - buffer_offsets_[i]);
    if (!b.empty()) layers_[i]->update_buffers(*cache.layers[i], b, momentum);
  }
}

}  // namespace fcrn
