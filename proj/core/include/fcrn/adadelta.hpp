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
#include <span>
#include <vector>

namespace fcrn {

struct AdaDeltaConfig {
  double rho = 0.9;
  double epsilon = 1e-6;
  // Multiplies every update; 1 is the plain method.
  double learning_rate = 1.0;
};

// AdaDelta state: running averages of squared gradients and squared updates.
//   E[g^2] <- rho E[g^2] + (1 - rho) g^2
//   dx     <- -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
//   E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
class AdaDelta {
 public:
  AdaDelta(std::size_t num_params, AdaDeltaConfig config = {});

  const AdaDeltaConfig& config() const noexcept { return config_; }
  std::span<const double> mean_sq_grad() const noexcept { return sq_grad_; }
  std::span<const double> mean_sq_update() const noexcept { return sq_update_; }
  std::size_t steps() const noexcept { return steps_; }

  // Applies one update in place. Returns false and changes nothing when any
  // gradient entry is not finite.
  bool step(std::span<double> params, std::span<const double> grads);

 private:
  AdaDeltaConfig config_;
  std::vector<double> sq_grad_;
  std::vector<double> sq_update_;
  std::size_t steps_ = 0;
};

}  // namespace fcrn
