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

#include "fcrn/adadelta.hpp"

#include <algorithm>
#include <cmath>

#include "fcrn/error.hpp"

namespace fcrn {

AdaDelta::AdaDelta(std::size_t num_params, AdaDeltaConfig config)
    : config_(config), sq_grad_(num_params, 0.0), sq_update_(num_params, 0.0) {
  if (!(config.rho > 0.0 && config.rho < 1.0)) throw ConfigError("AdaDelta rho must be in (0, 1)");
  if (!(config.epsilon > 0.0)) throw ConfigError("AdaDelta epsilon must be positive");
}

bool AdaDelta::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != sq_grad_.size() || grads.size() != sq_grad_.size()) {
    throw ConfigError("AdaDelta parameter count mismatch");
  }
  if (!std::all_of(grads.begin(), grads.end(), [](double g) { return std::isfinite(g); })) return false;
  const double rho = config_.rho;
  const double eps = config_.epsilon;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    sq_grad_[i] = rho * sq_grad_[i] + (1.0 - rho) * g * g;
    const double dx = -std::sqrt(sq_update_[i] + eps) / std::sqrt(sq_grad_[i] + eps) * g;
    sq_update_[i] = rho * sq_update_[i] + (1.0 - rho) * dx * dx;
    params[i] += config_.learning_rate * dx;
  }
  ++steps_;
  return true;
}

}  // namespace fcrn
