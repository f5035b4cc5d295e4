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

#include "fcrn/ink.hpp"

namespace fcrn {

inline constexpr int kMaxSignatureLevel = 4;

// Number of coefficients of a planar signature truncated at `level`:
// 2^(level+1) - 1.
constexpr std::size_t signature_dim(int level) { return (std::size_t{2} << level) - 1; }

// Offset of the level-k block inside the flat coefficient vector.
constexpr std::size_t level_offset(int k) { return (std::size_t{1} << k) - 1; }

// Truncated signature of a planar path. Level k occupies 2^k coefficients in
// lexicographic multi-index order with x = 0 and y = 1, so the word
// (i_1, ..., i_k) sits at level_offset(k) + sum_j i_j * 2^(k - j).
class TruncatedSignature {
 public:
  // Signature of the constant path: 1 followed by zeros.
  explicit TruncatedSignature(int level);

  int level() const noexcept { return level_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> mutable_coeffs() noexcept { return coeffs_; }
  std::span<const double> block(int k) const;

  double operator[](std::size_t i) const { return coeffs_[i]; }

 private:
  int level_;
  std::vector<double> coeffs_;
};

// Signature of the straight segment with displacement (dx, dy): level k is
// the k-fold tensor power divided by k!.
TruncatedSignature line_signature(double dx, double dy, int level);

// Truncated tensor product (Chen's identity) of the signatures of two
// consecutive paths.
TruncatedSignature chen_concat(const TruncatedSignature& a, const TruncatedSignature& b);

// Signature of the piecewise-linear path through `points`.
TruncatedSignature path_signature(std::span<const Point> points, int level);

class FeatureMaps {
 public:
  FeatureMaps() = default;
  FeatureMaps(int channels, int height, int width);

  int channels() const noexcept { return channels_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }

  double& at(int c, int y, int x) { return values_[index(c, y, x)]; }
  double at(int c, int y, int x) const { return values_[index(c, y, x)]; }

  // Channel-major C x H x W storage.
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
};

struct RasterOptions {
  int level = 2;
  int window_radius = 4;
  // Target height H; rows are 0..H-1 and coordinates are scaled by 1/H.
  int height = 128;
  // 0 sizes the raster to the sample; otherwise points past it are dropped.
  int width = 0;
};

// Resamples a stroke to unit arc-length spacing; keeps both endpoints.
std::vector<Point> resample_unit_spacing(std::span<const Point> points);

// Writes windowed signatures of every resampled stroke point into the pixel
// under it. Expects a sample already normalized to options.height.
FeatureMaps rasterize(const TextLineSample& sample, const RasterOptions& options);

}  // namespace fcrn
