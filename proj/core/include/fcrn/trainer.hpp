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
#include <cstdint>
#include <functional>
#include <vector>

#include "fcrn/adadelta.hpp"
#include "fcrn/ink.hpp"
#include "fcrn/model.hpp"
#include "fcrn/pathsig.hpp"

namespace fcrn {

// Raw ink -> height-normalized -> signature feature maps, padded on the right
// to at least `min_width` columns.
struct Featurizer {
  RasterOptions raster;
  int min_width = 1;

  FeatureMaps operator()(const TextLineSample& sample) const;
};

// Featurizer whose minimum width is the receptive-field width of `model`.
Featurizer make_featurizer(const Model& model, int level, int window_radius, int height);

struct IterationRecord {
  std::size_t iteration = 0;
  double loss = 0.0;       // mean -ln p(z|x) over the usable samples of the batch
  std::size_t used = 0;    // samples that contributed
};

struct TrainConfig {
  std::size_t iterations = 1000;
  std::size_t batch_size = 8;
  std::uint64_t seed = 1;
  AdaDeltaConfig optimizer;
  double batchnorm_momentum = 0.1;
  // Worker threads for the per-sample forward/backward passes of a batch.
  int threads = 1;
  std::function<void(const IterationRecord&)> on_iteration;
};

struct TrainResult {
  std::vector<double> loss_trace;
  std::size_t skipped_samples = 0;  // impossible labels (T too short)
  std::size_t rejected_steps = 0;   // non-finite gradients
  bool diverged = false;            // stopped on a NaN loss; params restored
};

// Minimizes the summed CTC loss -sum ln p(z|x) with AdaDelta, updating
// `model` in place. Batch gradients are reduced in sample order so results do
// not depend on the thread count.
TrainResult train(Model& model, const std::vector<TextLineSample>& samples, const Featurizer& featurizer,
                  const TrainConfig& config);

// Mean CTC loss and gradient of one sample; used by train and by tests.
struct SampleGradient {
  double loss = 0.0;
  bool feasible = true;
  Eigen::VectorXd grad;
  ForwardCache cache;
};
SampleGradient sample_gradient(const Model& model, const FeatureMaps& maps, const Label& label);

std::vector<PosteriorSequence> infer(const Model& model, const std::vector<TextLineSample>& samples,
                                     const Featurizer& featurizer);

}  // namespace fcrn
