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

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fcrn/layers.hpp"
#include "fcrn/pathsig.hpp"
#include "fcrn/tensor.hpp"

namespace fcrn {

// Knobs of the fully convolutional stack plus recurrent head. The stack is
// `blocks` x [conv 3x3 s1 p0x1, relu, pool 2x2 s2] followed by
// conv 3x1 s3x1 and conv 2x2 s1, with batch normalization on the last
// `batchnorm_layers` convolutions.
struct ArchitectureConfig {
  std::string preset = "desk";
  int height = 128;
  int blocks = 4;
  std::vector<int> conv_channels{8, 16, 32, 32, 64, 64};
  int batchnorm_layers = 4;
  int blstm_cells = 64;
  int blstm_layers = 2;
  // Hidden fully connected layers before the output projection.
  std::vector<int> hidden_dense{};
};

// "full", "desk", "compact" or "micro".
ArchitectureConfig architecture_preset(std::string_view name);

// Full layer chain ending in dense(num_labels) and softmax.
std::vector<LayerSpec> build_architecture(const ArchitectureConfig& config, int num_labels);

struct ForwardCache {
  std::vector<std::unique_ptr<LayerCache>> layers;
};

// Layer chain plus one flat parameter vector and one flat buffer vector
// (batch-norm running statistics), each laid out in layer order.
class Model {
 public:
  Model(std::vector<LayerSpec> architecture, int input_channels, std::uint64_t seed);

  const std::vector<LayerSpec>& architecture() const noexcept { return architecture_; }
  int input_channels() const noexcept { return input_channels_; }
  int num_labels() const noexcept { return output_channels_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t num_layers() const noexcept { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }
  std::span<double> buffers() noexcept { return buffers_; }
  std::span<const double> buffers() const noexcept { return buffers_; }

  std::span<const double> layer_params(std::size_t i) const;
  std::span<const double> layer_buffers(std::size_t i) const;

  // Runs the chain on an arbitrary blob (used for gradient checks of
  // partial networks too). Train mode fills `cache` when given.
  Blob forward_blob(const Blob& input, Mode mode, ForwardCache* cache = nullptr) const;
  // Returns dLoss/dParams (flat) given dLoss/dOutput.
  Eigen::VectorXd backward_blob(const ForwardCache& cache, const Blob& grad_output) const;

  // Requires the chain to end in softmax.
  PosteriorSequence forward(const FeatureMaps& maps, Mode mode, ForwardCache* cache = nullptr) const;
  // dLoss/dPosteriors is frames x labels.
  Eigen::VectorXd backward(const ForwardCache& cache, const Eigen::MatrixXd& grad_posteriors) const;

  void update_running_stats(const ForwardCache& cache, double momentum);

 private:
  std::vector<LayerSpec> architecture_;
  int input_channels_;
  int output_channels_ = 0;
  std::uint64_t seed_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<std::size_t> param_offsets_;
  std::vector<std::size_t> buffer_offsets_;
  std::vector<double> params_;
  std::vector<double> buffers_;
};

Blob to_blob(const FeatureMaps& maps);

}  // namespace fcrn
