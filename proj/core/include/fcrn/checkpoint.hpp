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
#include <filesystem>
#include <string>
#include <vector>

#include "fcrn/model.hpp"

namespace fcrn {

struct CheckpointMeta {
  std::vector<std::string> alphabet;
  int signature_level = 2;
  int window_radius = 4;
  int height = 128;
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
};

struct Checkpoint {
  Model model;
  CheckpointMeta meta;
};

// Writes a text manifest at `path` (layer specs, shapes, seed, iteration)
// and the parameters followed by the buffers as little-endian float64 to
// `path` + ".bin", in manifest order.
void save_checkpoint(const std::filesystem::path& path, const Model& model, const CheckpointMeta& meta);

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fcrn
