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

#include <Eigen/Dense>

namespace fcrn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Shape {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(channels) * height * width;
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Dense C x H x W activation, channel-major. A blob of height 1 doubles as a
// frame sequence of C features over T = W frames.
class Blob {
 public:
  Blob() = default;
  explicit Blob(Shape shape) : shape_(shape), data_(shape.size(), 0.0) {}
  Blob(Shape shape, std::vector<double> data);

  const Shape& shape() const noexcept { return shape_; }
  int channels() const noexcept { return shape_.channels; }
  int height() const noexcept { return shape_.height; }
  int width() const noexcept { return shape_.width; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  double* raw() noexcept { return data_.data(); }
  const double* raw() const noexcept { return data_.data(); }

  // channels x (height * width), one row per channel.
  Eigen::Map<RowMatrix> planes() { return {data_.data(), shape_.channels, shape_.height * shape_.width}; }
  Eigen::Map<const RowMatrix> planes() const {
    return {data_.data(), shape_.channels, shape_.height * shape_.width};
  }

  // T x C view of a height-1 blob; row t is frame t.
  Eigen::Map<Eigen::MatrixXd> frames();
  Eigen::Map<const Eigen::MatrixXd> frames() const;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Per-frame distributions over C' = C + {blank}; row t sums to one.
class PosteriorSequence {
 public:
  PosteriorSequence() = default;
  explicit PosteriorSequence(Eigen::MatrixXd probs) : probs_(std::move(probs)) {}

  int frames() const noexcept { return static_cast<int>(probs_.rows()); }
  int labels() const noexcept { return static_cast<int>(probs_.cols()); }
  double operator()(int t, int c) const { return probs_(t, c); }
  const Eigen::MatrixXd& matrix() const noexcept { return probs_; }

 private:
  Eigen::MatrixXd probs_;
};

}  // namespace fcrn
