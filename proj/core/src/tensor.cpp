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

#include "fcrn/tensor.hpp"

#include "fcrn/error.hpp"

namespace fcrn {

Blob::Blob(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size()) throw ConfigError("blob data does not match its shape");
}

Eigen::Map<Eigen::MatrixXd> Blob::frames() {
  if (shape_.height != 1) throw ConfigError("frame view needs a height-1 blob");
  return {data_.data(), shape_.width, shape_.channels};
}

Eigen::Map<const Eigen::MatrixXd> Blob::frames() const {
  if (shape_.height != 1) throw ConfigError("frame view needs a height-1 blob");
  return {data_.data(), shape_.width, shape_.channels};
}

}  // namespace fcrn
