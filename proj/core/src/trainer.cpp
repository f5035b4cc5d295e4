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

#include "fcrn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "fcrn/ctc.hpp"
#include "fcrn/error.hpp"
#include "fcrn/receptive_field.hpp"
#include "fcrn/synth.hpp"

namespace fcrn {

FeatureMaps Featurizer::operator()(const TextLineSample& sample) const {
  const auto normalized = normalize_height(sample, raster.height).sample;
  RasterOptions opts = raster;
  if (opts.width == 0) {
    const auto box = bounding_box(normalized);
    const int natural = box.empty ? 1 : static_cast<int>(std::lround(box.max_x)) + 1;
    opts.width = std::max(natural, min_width);
  }
  return rasterize(normalized, opts);
}

Featurizer make_featurizer(const Model& model, int level, int window_radius, int height) {
  Featurizer f;
  f.raster.level = level;
  f.raster.window_radius = window_radius;
  f.raster.height = height;
  const auto spatial = spatial_layers(model.architecture());
  f.min_width = spatial.empty() ? 1 : receptive_field(spatial).width;
  if (static_cast<int>(signature_dim(level)) != model.input_channels()) {
    throw ConfigError("signature level " + std::to_string(level) + " gives " +
                      std::to_string(signature_dim(level)) + " channels but the model expects " +
                      std::to_string(model.input_channels()));
  }
  return f;
}

SampleGradient sample_gradient(const Model& model, const FeatureMaps& maps, const Label& label) {
  SampleGradient out;
  const auto post = model.forward(maps, Mode::train, &out.cache);
  auto ctc = ctc_grad(post, label);
  out.loss = ctc.loss;
  out.feasible = ctc.feasible;
  if (ctc.feasible) out.grad = model.backward(out.cache, ctc.grad);
  return out;
}

TrainResult train(Model& model, const std::vector<TextLineSample>& samples, const Featurizer& featurizer,
                  const TrainConfig& config) {
  if (samples.empty()) throw ConfigError("training set is empty");
  if (config.batch_size == 0) throw ConfigError("batch size must be positive");
  if (model.architecture().back().kind != LayerKind::softmax) {
    throw ConfigError("architecture must end in softmax");
  }
  for (const auto& s : samples) {
    if (s.label.empty()) throw ConfigError("training samples need non-empty labels");
  }

  TrainResult result;
  AdaDelta optimizer(model.params().size(), config.optimizer);
  Rng rng(mix_seed(config.seed, 0x7a1));
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();

  const std::size_t batch = std::min(config.batch_size, samples.size());
  const int threads = std::max(1, config.threads);
  std::vector<SampleGradient> slots(batch);
  std::vector<double> last_params(model.params().begin(), model.params().end());
  std::vector<double> last_buffers(model.buffers().begin(), model.buffers().end());

  for (std::size_t it = 0; it < config.iterations; ++it) {
    std::vector<std::size_t> picked;
    while (picked.size() < batch) {
      if (cursor == order.size()) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        cursor = 0;
      }
      picked.push_back(order[cursor++]);
    }

    auto work = [&](std::size_t begin, std::size_t step) {
      for (std::size_t b = begin; b < picked.size(); b += step) {
        const auto& s = samples[picked[b]];
        slots[b] = sample_gradient(model, featurizer(s), s.label);
      }
    };
    if (threads == 1) {
      work(0, 1);
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(work, static_cast<std::size_t>(t), static_cast<std::size_t>(threads));
    }

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.params().size()));
    double loss = 0.0;
    std::size_t used = 0;
    for (auto& slot : slots) {
      if (!slot.feasible) {
        ++result.skipped_samples;
        continue;
      }
      grad += slot.grad;
      loss += slot.loss;
      ++used;
    }
    if (used == 0) {
      result.loss_trace.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    loss /= static_cast<double>(used);
    grad /= static_cast<double>(used);
    if (std::isnan(loss)) {
      std::copy(last_params.begin(), last_params.end(), model.params().begin());
      std::copy(last_buffers.begin(), last_buffers.end(), model.buffers().begin());
      result.diverged = true;
      break;
    }
    result.loss_trace.push_back(loss);

    std::copy(model.params().begin(), model.params().end(), last_params.begin());
    std::copy(model.buffers().begin(), model.buffers().end(), last_buffers.begin());
    if (!optimizer.step(model.params(), std::span<const double>(grad.data(), grad.size()))) {
      ++result.rejected_steps;
      continue;
    }
    for (auto& slot : slots) {
      if (slot.feasible) model.update_running_stats(slot.cache, config.batchnorm_momentum);
      slot = SampleGradient{};
    }
    if (config.on_iteration) config.on_iteration({it + 1, loss, used});
  }
  return result;
}

std::vector<PosteriorSequence> infer(const Model& model, const std::vector<TextLineSample>& samples,
                                     const Featurizer& featurizer) {
  std::vector<PosteriorSequence> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(model.forward(featurizer(s), Mode::eval));
  return out;
}

}  // namespace fcrn
