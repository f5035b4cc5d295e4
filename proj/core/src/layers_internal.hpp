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

#include <memory>

#include "fcrn/layers.hpp"

namespace fcrn::detail {

std::unique_ptr<Layer> make_blstm(const LayerSpec& spec, int in_features);

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(std::span<double> values, int fan_in, int fan_out, Rng& rng);

const LayerCache& require_cache(const LayerCache* cache, const char* layer);

}  // namespace fcrn::detail
