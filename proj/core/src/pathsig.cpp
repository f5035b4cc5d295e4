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

#include "fcrn/pathsig.hpp"

#include <algorithm>
#include <cmath>

#include "fcrn/error.hpp"

namespace fcrn {

namespace {

void check_level(int level) {
  if (level < 0 || level > kMaxSignatureLevel) {
    throw ConfigError("signature level must be in 0.." + std::to_string(kMaxSignatureLevel));
  }
}

}  // namespace

TruncatedSignature::TruncatedSignature(int level) : level_(level) {
  check_level(level);
  coeffs_.assign(signature_dim(level), 0.0);
  coeffs_[0] = 1.0;
}

std::span<const double> TruncatedSignature::block(int k) const {
  if (k < 0 || k > level_) throw ConfigError("signature block out of range");
  return std::span<const double>(coeffs_).subspan(level_offset(k), std::size_t{1} << k);
}

TruncatedSignature line_signature(double dx, double dy, int level) {
  TruncatedSignature sig(level);
  auto c = sig.mutable_coeffs();
  const double d[2] = {dx, dy};
  // level k word w = (w', i): coefficient(w) = coefficient(w') * d_i / k.
  for (int k = 1; k <= level; ++k) {
    const std::size_t prev = level_offset(k - 1);
    const std::size_t cur = level_offset(k);
    const std::size_t prev_len = std::size_t{1} << (k - 1);
    for (std::size_t w = 0; w < prev_len; ++w) {
      const double base = c[prev + w] / k;
      c[cur + 2 * w] = base * d[0];
      c[cur + 2 * w + 1] = base * d[1];
    }
  }
  return sig;
}

TruncatedSignature chen_concat(const TruncatedSignature& a, const TruncatedSignature& b) {
  if (a.level() != b.level()) throw ConfigError("chen_concat: signature levels differ");
  const int n = a.level();
  TruncatedSignature out(n);
  auto r = out.mutable_coeffs();
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  for (int k = 0; k <= n; ++k) {
    const std::size_t off = level_offset(k);
    for (std::size_t w = 0; w < (std::size_t{1} << k); ++w) r[off + w] = 0.0;
    // Word (u, v) with |u| = i, |v| = k - i has index u * 2^(k-i) + v.
    for (int i = 0; i <= k; ++i) {
      const int j = k - i;
      const std::size_t oa = level_offset(i);
      const std::size_t ob = level_offset(j);
      const std::size_t nb = std::size_t{1} << j;
      for (std::size_t u = 0; u < (std::size_t{1} << i); ++u) {
        const double au = ca[oa + u];
        if (au == 0.0) continue;
        for (std::size_t v = 0; v < nb; ++v) r[off + u * nb + v] += au * cb[ob + v];
      }
    }
  }
  return out;
}

TruncatedSignature path_signature(std::span<const Point> points, int level) {
  TruncatedSignature sig(level);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double dx = points[i].x - points[i - 1].x;
    const double dy = points[i].y - points[i - 1].y;
    if (dx == 0.0 && dy == 0.0) continue;
    sig = chen_concat(sig, line_signature(dx, dy, level));
  }
  return sig;
}

FeatureMaps::FeatureMaps(int channels, int height, int width)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 1 || height < 1 || width < 1) throw ConfigError("feature maps need positive dimensions");
  values_.assign(static_cast<std::size_t>(channels) * height * width, 0.0);
}

std::vector<Point> resample_unit_spacing(std::span<const Point> points) {
  std::vector<Point> out;
  if (points.empty()) return out;
  out.push_back(points.front());
  // Arc length still to travel before the next sample is due.
  double until_next = 1.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Point a = points[i - 1];
    const Point b = points[i];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    double travelled = 0.0;
    while (len - travelled >= until_next) {
      travelled += until_next;
      const double f = travelled / len;
      out.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
      until_next = 1.0;
    }
    until_next -= len - travelled;
  }
  const Point last = points.back();
  const Point& tail = out.back();
  if (std::hypot(last.x - tail.x, last.y - tail.y) > 1e-9) out.push_back(last);
  return out;
}

FeatureMaps rasterize(const TextLineSample& sample, const RasterOptions& options) {
  check_level(options.level);
  if (options.height < 1) throw ConfigError("raster height must be positive");
  if (options.window_radius < 0) throw ConfigError("window radius must be non-negative");
  if (options.width < 0) throw ConfigError("raster width must be non-negative");

  int width = options.width;
  if (width == 0) {
    const auto box = bounding_box(sample);
    width = box.empty ? 1 : std::max(1, static_cast<int>(std::floor(box.max_x + 0.5)) + 1);
  }
  const int channels = static_cast<int>(signature_dim(options.level));
  FeatureMaps maps(channels, options.height, width);
  const double inv_h = 1.0 / options.height;
  const int radius = options.window_radius;

  std::vector<Point> window;
  for (const auto& stroke : sample.strokes) {
    const auto pts = resample_unit_spacing(stroke.points);
    const int n = static_cast<int>(pts.size());
    for (int i = 0; i < n; ++i) {
      const long col = std::lround(pts[i].x);
      const long row = std::clamp<long>(std::lround(pts[i].y), 0, options.height - 1);
      if (col < 0 || col >= width) continue;
      const int lo = std::max(0, i - radius);
      const int hi = std::min(n - 1, i + radius);
      window.clear();
      for (int j = lo; j <= hi; ++j) window.push_back({pts[j].x * inv_h, pts[j].y * inv_h});
      const auto sig = path_signature(window, options.level);
      for (int c = 0; c < channels; ++c) {
        maps.at(c, static_cast<int>(row), static_cast<int>(col)) = sig[c];
      }
    }
  }
  return maps;
}

}  // namespace fcrn
