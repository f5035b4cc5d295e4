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

#include <span>
#include <vector>

#include "fcrn/layers.hpp"

namespace fcrn {

struct ReceptiveField {
  int height = 1;
  int width = 1;
  friend bool operator==(const ReceptiveField&, const ReceptiveField&) = default;
};

// Size of the input region seen by one top-level unit, from the top down:
// r = (r_above - 1) * stride + kernel with r = 1 at the top. Only conv and
// pool layers are accepted.
ReceptiveField receptive_field(std::span<const LayerSpec> chain);

struct FieldPosition {
  double y = 0.0;
  double x = 0.0;
};

// Input position of top-level unit (top_y, top_x):
// p = stride * p_above + ((kernel - 1) / 2 - padding).
FieldPosition field_position(std::span<const LayerSpec> chain, double top_y, double top_x);

// The conv and pool layers of an architecture, in order, up to the first
// sequence layer. Pointwise layers (batchnorm, relu) are dropped.
std::vector<LayerSpec> spatial_layers(std::span<const LayerSpec> architecture);

struct SpatialOutput {
  int height = 0;
  int width = 0;
  // Frame count; equals width when height is 1, otherwise 0.
  int frames = 0;
};

// Floor-mode shape arithmetic over the spatial part of `chain`. Throws
// ConfigError when the input is smaller than a kernel, or when the chain has
// sequence layers and the spatial output is not exactly one row.
SpatialOutput output_shape(std::span<const LayerSpec> chain, int height, int width);

// Cumulative geometry after each spatial layer, bottom-up.
struct FieldRow {
  LayerSpec layer;
  ReceptiveField field;
  Extent jump;  // input pixels between adjacent units of this layer
};
std::vector<FieldRow> receptive_field_table(std::span<const LayerSpec> chain);

}  // namespace fcrn
