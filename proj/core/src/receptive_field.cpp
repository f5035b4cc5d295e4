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

#include "fcrn/receptive_field.hpp"

#include "fcrn/error.hpp"

namespace fcrn {

namespace {

void require_spatial(std::span<const LayerSpec> chain) {
  if (chain.empty()) throw ConfigError("receptive field of an empty chain");
  for (const auto& l : chain) {
    if (!l.spatial()) throw ConfigError("receptive field chain contains non-spatial layer '" + to_string(l) + "'");
    if (l.kernel.h < 1 || l.kernel.w < 1 || l.stride.h < 1 || l.stride.w < 1) {
      throw ConfigError("kernel and stride must be positive in '" + to_string(l) + "'");
    }
  }
}

bool is_sequence_layer(LayerKind k) {
  return k == LayerKind::blstm || k == LayerKind::dense || k == LayerKind::softmax;
}

}  // namespace

ReceptiveField receptive_field(std::span<const LayerSpec> chain) {
  require_spatial(chain);
  long rh = 1, rw = 1;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    rh = (rh - 1) * it->stride.h + it->kernel.h;
    rw = (rw - 1) * it->stride.w + it->kernel.w;
  }
  return {static_cast<int>(rh), static_cast<int>(rw)};
}

FieldPosition field_position(std::span<const LayerSpec> chain, double top_y, double top_x) {
  require_spatial(chain);
  FieldPosition p{top_y, top_x};
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    p.y = it->stride.h * p.y + ((it->kernel.h - 1) / 2.0 - it->padding.h);
    p.x = it->stride.w * p.x + ((it->kernel.w - 1) / 2.0 - it->padding.w);
  }
  return p;
}

std::vector<LayerSpec> spatial_layers(std::span<const LayerSpec> architecture) {
  std::vector<LayerSpec> out;
  for (const auto& l : architecture) {
    if (is_sequence_layer(l.kind)) break;
    if (l.spatial()) out.push_back(l);
  }
  return out;
}

SpatialOutput output_shape(std::span<const LayerSpec> chain, int height, int width) {
  if (height < 1 || width < 1) throw ConfigError("input must be at least 1x1");
  int h = height, w = width;
  bool has_sequence = false;
  for (const auto& l : chain) {
    if (is_sequence_layer(l.kind)) {
      has_sequence = true;
      break;
    }
    if (!l.spatial()) continue;
    const int ph = l.kind == LayerKind::conv ? l.padding.h : 0;
    const int pw = l.kind == LayerKind::conv ? l.padding.w : 0;
    const int span_h = h + 2 * ph - l.kernel.h;
    const int span_w = w + 2 * pw - l.kernel.w;
    if (span_h < 0 || span_w < 0) {
      throw ConfigError("input " + std::to_string(height) + "x" + std::to_string(width) +
                        " is smaller than the receptive field at layer '" + to_string(l) + "'");
    }
    h = span_h / l.stride.h + 1;
    w = span_w / l.stride.w + 1;
  }
  if (has_sequence && h != 1) {
    throw ConfigError("spatial output height is " + std::to_string(h) +
                      " but sequence layers need height 1");
  }
  return {h, w, h == 1 ? w : 0};
}

std::vector<FieldRow> receptive_field_table(std::span<const LayerSpec> chain) {
  require_spatial(chain);
  std::vector<FieldRow> rows;
  long rh = 1, rw = 1, jh = 1, jw = 1;
  for (const auto& l : chain) {
    rh += (l.kernel.h - 1) * jh;
    rw += (l.kernel.w - 1) * jw;
    jh *= l.stride.h;
    jw *= l.stride.w;
    rows.push_back({l, {static_cast<int>(rh), static_cast<int>(rw)},
                    {static_cast<int>(jh), static_cast<int>(jw)}});
  }
  return rows;
}

}  // namespace fcrn
