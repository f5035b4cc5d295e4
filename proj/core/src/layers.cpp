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

#include "fcrn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fcrn/error.hpp"
#include "fcrn/synth.hpp"
#include "layers_internal.hpp"

namespace fcrn {

namespace detail {

void glorot_uniform(std::span<double> values, int fan_in, int fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& v : values) v = rng.uniform(-bound, bound);
}

const LayerCache& require_cache(const LayerCache* cache, const char* layer) {
  if (cache == nullptr) throw Error(std::string(layer) + " backward called without a forward cache");
  return *cache;
}

}  // namespace detail

LayerSpec LayerSpec::conv(Extent kernel, Extent stride, Extent padding, int channels) {
  return {LayerKind::conv, kernel, stride, padding, channels};
}
LayerSpec LayerSpec::pool(Extent kernel, Extent stride) {
  return {LayerKind::pool, kernel, stride, {0, 0}, 0};
}
LayerSpec LayerSpec::batchnorm() { return {LayerKind::batchnorm, {1, 1}, {1, 1}, {0, 0}, 0}; }
LayerSpec LayerSpec::relu() { return {LayerKind::relu, {1, 1}, {1, 1}, {0, 0}, 0}; }
LayerSpec LayerSpec::blstm(int cells) { return {LayerKind::blstm, {1, 1}, {1, 1}, {0, 0}, cells}; }
LayerSpec LayerSpec::dense(int units) { return {LayerKind::dense, {1, 1}, {1, 1}, {0, 0}, units}; }
LayerSpec LayerSpec::softmax() { return {LayerKind::softmax, {1, 1}, {1, 1}, {0, 0}, 0}; }

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv: return "conv";
    case LayerKind::pool: return "pool";
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::relu: return "relu";
    case LayerKind::blstm: return "blstm";
    case LayerKind::dense: return "dense";
    case LayerKind::softmax: return "softmax";
  }
  return "?";
}

std::string to_string(const LayerSpec& spec) {
  std::ostringstream out;
  out << to_string(spec.kind);
  auto extent = [&](const char* key, Extent e) { out << ' ' << key << '=' << e.h << 'x' << e.w; };
  if (spec.kind == LayerKind::conv || spec.kind == LayerKind::pool) {
    extent("k", spec.kernel);
    extent("s", spec.stride);
  }
  if (spec.kind == LayerKind::conv) extent("p", spec.padding);
  if (spec.kind == LayerKind::conv || spec.kind == LayerKind::blstm || spec.kind == LayerKind::dense) {
    out << " n=" << spec.units;
  }
  return out.str();
}

LayerSpec parse_layer_spec(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  if (!(in >> kind)) throw ParseError("empty layer spec", 0);
  LayerSpec spec;
  if (kind == "conv") spec.kind = LayerKind::conv;
  else if (kind == "pool") spec.kind = LayerKind::pool;
  else if (kind == "batchnorm") spec.kind = LayerKind::batchnorm;
  else if (kind == "relu") spec.kind = LayerKind::relu;
  else if (kind == "blstm") spec.kind = LayerKind::blstm;
  else if (kind == "dense") spec.kind = LayerKind::dense;
  else if (kind == "softmax") spec.kind = LayerKind::softmax;
  else throw ParseError("unknown layer kind '" + kind + "'", 0);

  auto parse_extent = [&](const std::string& v) {
    auto x = v.find('x');
    if (x == std::string::npos) throw ParseError("bad extent '" + v + "'", 0);
    try {
      return Extent{std::stoi(v.substr(0, x)), std::stoi(v.substr(x + 1))};
    } catch (const std::exception&) {
      throw ParseError("bad extent '" + v + "'", 0);
    }
  };
  std::string field;
  while (in >> field) {
    auto eq = field.find('=');
    if (eq == std::string::npos) throw ParseError("bad layer field '" + field + "'", 0);
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "k") spec.kernel = parse_extent(value);
    else if (key == "s") spec.stride = parse_extent(value);
    else if (key == "p") spec.padding = parse_extent(value);
    else if (key == "n") {
      try {
        spec.units = std::stoi(value);
      } catch (const std::exception&) {
        throw ParseError("bad unit count '" + value + "'", 0);
      }
    } else {
      throw ParseError("unknown layer field '" + key + "'", 0);
    }
  }
  return spec;
}

std::size_t Layer::num_params() const {
  std::size_t n = 0;
  for (const auto& b : param_blocks()) n += b.size();
  return n;
}

void Layer::init(std::span<double> params, std::span<double> buffers, Rng&) const {
  std::fill(params.begin(), params.end(), 0.0);
  std::fill(buffers.begin(), buffers.end(), 0.0);
}

namespace {

void require_sequence(const Shape& in, const char* layer) {
  if (in.height != 1) {
    throw ConfigError(std::string(layer) + " needs a height-1 input but got height " +
                      std::to_string(in.height));
  }
}

// ---------------------------------------------------------------- conv

struct ConvCache : LayerCache {
  Shape in_shape;
  RowMatrix columns;  // (C*kh*kw) x (Ho*Wo)
};

class ConvLayer final : public Layer {
 public:
  ConvLayer(const LayerSpec& spec, int in_channels) : Layer(spec), in_channels_(in_channels) {
    const auto& s = spec;
    if (s.kernel.h < 1 || s.kernel.w < 1 || s.stride.h < 1 || s.stride.w < 1 ||
        s.padding.h < 0 || s.padding.w < 0 || s.units < 1) {
      throw ConfigError("invalid convolution spec: " + to_string(spec));
    }
  }

  Shape output_shape(const Shape& in) const override {
    if (in.channels != in_channels_) {
      throw ConfigError("conv expects " + std::to_string(in_channels_) + " channels, got " +
                        std::to_string(in.channels));
    }
    const auto& s = spec();
    const int hp = in.height + 2 * s.padding.h - s.kernel.h;
    const int wp = in.width + 2 * s.padding.w - s.kernel.w;
    if (hp < 0 || wp < 0) {
      throw ConfigError("input " + std::to_string(in.height) + "x" + std::to_string(in.width) +
                        " smaller than conv kernel " + to_string(spec()));
    }
    return {s.units, hp / s.stride.h + 1, wp / s.stride.w + 1};
  }

  std::vector<ParamBlock> param_blocks() const override {
    const auto& s = spec();
    return {{"weight", s.units, in_channels_ * s.kernel.h * s.kernel.w}, {"bias", s.units, 1}};
  }

  void init(std::span<double> params, std::span<double>, Rng& rng) const override {
    const auto& s = spec();
    const int area = s.kernel.h * s.kernel.w;
    const std::size_t nw = static_cast<std::size_t>(s.units) * in_channels_ * area;
    detail::glorot_uniform(params.first(nw), in_channels_ * area, s.units * area, rng);
    std::fill(params.begin() + nw, params.end(), 0.0);
  }

  Blob forward(const Blob& in, std::span<const double> params, std::span<const double>, Mode,
               std::unique_ptr<LayerCache>* cache) const override {
    const Shape out_shape = output_shape(in.shape());
    RowMatrix columns = im2col(in, out_shape);
    const auto& s = spec();
    const int k = in_channels_ * s.kernel.h * s.kernel.w;
    Eigen::Map<const RowMatrix> weight(params.data(), s.units, k);
    Eigen::Map<const Eigen::VectorXd> bias(params.data() + weight.size(), s.units);
    Blob out(out_shape);
    auto y = out.planes();
    y.noalias() = weight * columns;
    y.colwise() += bias;
    if (cache) {
      auto c = std::make_unique<ConvCache>();
      c->in_shape = in.shape();
      c->columns = std::move(columns);
      *cache = std::move(c);
    }
    return out;
  }

  Blob backward(const Blob& grad_out, const LayerCache* cache, std::span<const double> params,
                std::span<double> grad_params) const override {
    const auto& c = static_cast<const ConvCache&>(detail::require_cache(cache, "conv"));
    const auto& s = spec();
    const int k = in_channels_ * s.kernel.h * s.kernel.w;
    Eigen::Map<const RowMatrix> weight(params.data(), s.units, k);
    Eigen::Map<RowMatrix> d_weight(grad_params.data(), s.units, k);
    Eigen::Map<Eigen::VectorXd> d_bias(grad_params.data() + d_weight.size(), s.units);
    const auto dy = grad_out.planes();
    d_weight.noalias() += dy * c.columns.transpose();
    d_bias += dy.rowwise().sum();
    RowMatrix d_columns = weight.transpose() * dy;
    return col2im(d_columns, c.in_shape, grad_out.shape());
  }

 private:
  RowMatrix im2col(const Blob& in, const Shape& out) const {
    const auto& s = spec();
    const int kh = s.kernel.h, kw = s.kernel.w;
    RowMatrix cols(static_cast<Eigen::Index>(in_channels_) * kh * kw,
                   static_cast<Eigen::Index>(out.height) * out.width);
    const double* src = in.raw();
    for (int c = 0; c < in_channels_; ++c) {
      for (int ki = 0; ki < kh; ++ki) {
        for (int kj = 0; kj < kw; ++kj) {
          double* row = cols.data() + ((static_cast<std::size_t>(c) * kh + ki) * kw + kj) * cols.cols();
          for (int oy = 0; oy < out.height; ++oy) {
            const int iy = oy * s.stride.h + ki - s.padding.h;
            double* dst = row + static_cast<std::size_t>(oy) * out.width;
            if (iy < 0 || iy >= in.height()) {
              std::fill(dst, dst + out.width, 0.0);
              continue;
            }
            const double* line = src + (static_cast<std::size_t>(c) * in.height() + iy) * in.width();
            for (int ox = 0; ox < out.width; ++ox) {
              const int ix = ox * s.stride.w + kj - s.padding.w;
              dst[ox] = (ix >= 0 && ix < in.width()) ? line[ix] : 0.0;
            }
          }
        }
      }
    }
    return cols;
  }

  Blob col2im(const RowMatrix& cols, const Shape& in_shape, const Shape& out) const {
    const auto& s = spec();
    const int kh = s.kernel.h, kw = s.kernel.w;
    Blob grad(in_shape);
    double* dst = grad.raw();
    for (int c = 0; c < in_channels_; ++c) {
      for (int ki = 0; ki < kh; ++ki) {
        for (int kj = 0; kj < kw; ++kj) {
          const double* row = cols.data() + ((static_cast<std::size_t>(c) * kh + ki) * kw + kj) * cols.cols();
          for (int oy = 0; oy < out.height; ++oy) {
            const int iy = oy * s.stride.h + ki - s.padding.h;
            if (iy < 0 || iy >= in_shape.height) continue;
            double* line = dst + (static_cast<std::size_t>(c) * in_shape.height + iy) * in_shape.width;
            const double* src = row + static_cast<std::size_t>(oy) * out.width;
            for (int ox = 0; ox < out.width; ++ox) {
              const int ix = ox * s.stride.w + kj - s.padding.w;
              if (ix >= 0 && ix < in_shape.width) line[ix] += src[ox];
            }
          }
        }
      }
    }
    return grad;
  }

  int in_channels_;
};

// ---------------------------------------------------------------- pool

struct PoolCache : LayerCache {
  Shape in_shape;
  std::vector<std::size_t> argmax;
};

class PoolLayer final : public Layer {
 public:
  explicit PoolLayer(const LayerSpec& spec) : Layer(spec) {
    if (spec.kernel.h < 1 || spec.kernel.w < 1 || spec.stride.h < 1 || spec.stride.w < 1) {
      throw ConfigError("invalid pooling spec: " + to_string(spec));
    }
  }

  Shape output_shape(const Shape& in) const override {
    const auto& s = spec();
    if (in.height < s.kernel.h || in.width < s.kernel.w) {
      throw ConfigError("input " + std::to_string(in.height) + "x" + std::to_string(in.width) +
                        " smaller than pooling window " + to_string(spec()));
    }
    return {in.channels, (in.height - s.kernel.h) / s.stride.h + 1,
            (in.width - s.kernel.w) / s.stride.w + 1};
  }

  Blob forward(const Blob& in, std::span<const double>, std::span<const double>, Mode,
               std::unique_ptr<LayerCache>* cache) const override {
    const Shape out_shape = output_shape(in.shape());
    const auto& s = spec();
    Blob out(out_shape);
    std::vector<std::size_t> argmax(out_shape.size());
    const double* src = in.raw();
    double* dst = out.raw();
    std::size_t o = 0;
    for (int c = 0; c < out_shape.channels; ++c) {
      for (int oy = 0; oy < out_shape.height; ++oy) {
        for (int ox = 0; ox < out_shape.width; ++ox, ++o) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_i = 0;
          for (int ki = 0; ki < s.kernel.h; ++ki) {
            const std::size_t base =
                (static_cast<std::size_t>(c) * in.height() + oy * s.stride.h + ki) * in.width() + ox * s.stride.w;
            for (int kj = 0; kj < s.kernel.w; ++kj) {
              if (src[base + kj] > best) {
                best = src[base + kj];
                best_i = base + kj;
              }
            }
          }
          dst[o] = best;
          argmax[o] = best_i;
        }
      }
    }
    if (cache) {
      auto c = std::make_unique<PoolCache>();
      c->in_shape = in.shape();
      c->argmax = std::move(argmax);
      *cache = std::move(c);
    }
    return out;
  }

  Blob backward(const Blob& grad_out, const LayerCache* cache, std::span<const double>,
                std::span<double>) const override {
    const auto& c = static_cast<const PoolCache&>(detail::require_cache(cache, "pool"));
    Blob grad(c.in_shape);
    const double* dy = grad_out.raw();
    for (std::size_t o = 0; o < c.argmax.size(); ++o) grad.raw()[c.argmax[o]] += dy[o];
    return grad;
  }
};

// ---------------------------------------------------------------- batchnorm

constexpr double kBatchNormEps = 1e-5;

struct BatchNormCache : LayerCache {
  Mode mode = Mode::train;
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  Eigen::VectorXd inv_std;
  RowMatrix normalized;
};

// Per-channel normalization. Train mode uses statistics over the spatial
// positions of the current input; eval mode uses the running buffers.
class BatchNormLayer final : public Layer {
 public:
  BatchNormLayer(const LayerSpec& spec, int channels) : Layer(spec), channels_(channels) {}

  Shape output_shape(const Shape& in) const override {
    if (in.channels != channels_) throw ConfigError("batchnorm channel mismatch");
    return in;
  }

  std::vector<ParamBlock> param_blocks() const override {
    return {{"gamma", channels_, 1}, {"beta", channels_, 1}};
  }
  std::size_t num_buffers() const override { return 2 * static_cast<std::size_t>(channels_); }

  void init(std::span<double> params, std::span<double> buffers, Rng&) const override {
    std::fill(params.begin(), params.begin() + channels_, 1.0);
    std::fill(params.begin() + channels_, params.end(), 0.0);
    std::fill(buffers.begin(), buffers.begin() + channels_, 0.0);
    std::fill(buffers.begin() + channels_, buffers.end(), 1.0);
  }

  Blob forward(const Blob& in, std::span<const double> params, std::span<const double> buffers,
               Mode mode, std::unique_ptr<LayerCache>* cache) const override {
    output_shape(in.shape());
    const auto x = in.planes();
    Eigen::Map<const Eigen::VectorXd> gamma(params.data(), channels_);
    Eigen::Map<const Eigen::VectorXd> beta(params.data() + channels_, channels_);
    Eigen::VectorXd mean, var;
    if (mode == Mode::train) {
      mean = x.rowwise().mean();
      var = (x.colwise() - mean).array().square().rowwise().mean();
    } else {
      mean = Eigen::Map<const Eigen::VectorXd>(buffers.data(), channels_);
      var = Eigen::Map<const Eigen::VectorXd>(buffers.data() + channels_, channels_);
    }
    const Eigen::VectorXd inv_std = (var.array() + kBatchNormEps).rsqrt();
    RowMatrix normalized = (x.colwise() - mean).array().colwise() * inv_std.array();
    Blob out(in.shape());
    auto y = out.planes();
    y = (normalized.array().colwise() * gamma.array()).colwise() + beta.array();
    if (cache) {
      auto c = std::make_unique<BatchNormCache>();
      c->mode = mode;
      c->mean = std::move(mean);
      c->var = std::move(var);
      c->inv_std = inv_std;
      c->normalized = std::move(normalized);
      *cache = std::move(c);
    }
    return out;
  }

  Blob backward(const Blob& grad_out, const LayerCache* cache, std::span<const double> params,
                std::span<double> grad_params) const override {
    const auto& c = static_cast<const BatchNormCache&>(detail::require_cache(cache, "batchnorm"));
    Eigen::Map<const Eigen::VectorXd> gamma(params.data(), channels_);
    Eigen::Map<Eigen::VectorXd> d_gamma(grad_params.data(), channels_);
    Eigen::Map<Eigen::VectorXd> d_beta(grad_params.data() + channels_, channels_);
    const auto dy = grad_out.planes();
    const Eigen::VectorXd sum_dy = dy.rowwise().sum();
    const Eigen::VectorXd sum_dy_xhat = (dy.array() * c.normalized.array()).rowwise().sum();
    d_gamma += sum_dy_xhat;
    d_beta += sum_dy;
    Blob grad(grad_out.shape());
    auto dx = grad.planes();
    const Eigen::VectorXd scale = gamma.array() * c.inv_std.array();
    if (c.mode == Mode::eval) {
      dx = dy.array().colwise() * scale.array();
      return grad;
    }
    const double n = static_cast<double>(dy.cols());
    const Eigen::VectorXd mean_dy = sum_dy / n;
    const Eigen::VectorXd mean_dy_xhat = sum_dy_xhat / n;
    dx = ((dy.array().colwise() - mean_dy.array()) -
          c.normalized.array().colwise() * mean_dy_xhat.array())
             .colwise() *
         scale.array();
    return grad;
  }

  void update_buffers(const LayerCache& cache, std::span<double> buffers, double momentum) const override {
    const auto& c = static_cast<const BatchNormCache&>(cache);
    if (c.mode != Mode::train) return;
    Eigen::Map<Eigen::VectorXd> mean(buffers.data(), channels_);
    Eigen::Map<Eigen::VectorXd> var(buffers.data() + channels_, channels_);
    mean = (1.0 - momentum) * mean + momentum * c.mean;
    var = (1.0 - momentum) * var + momentum * c.var;
  }

 private:
  int channels_;
};

// ---------------------------------------------------------------- relu

struct MaskCache : LayerCache {
  std::vector<char> active;
};

class ReluLayer final : public Layer {
 public:
  explicit ReluLayer(const LayerSpec& spec) : Layer(spec) {}

  Shape output_shape(const Shape& in) const override { return in; }

  Blob forward(const Blob& in, std::span<const double>, std::span<const double>, Mode,
               std::unique_ptr<LayerCache>* cache) const override {
    Blob out(in.shape());
    const auto src = in.data();
    auto dst = out.data();
    std::vector<char> active(cache ? src.size() : 0);
    for (std::size_t i = 0; i < src.size(); ++i) {
      const bool on = src[i] > 0.0;
      dst[i] = on ? src[i] : 0.0;
      if (cache) active[i] = on;
    }
    if (cache) {
      auto c = std::make_unique<MaskCache>();
      c->active = std::move(active);
      *cache = std::move(c);
    }
    return out;
  }

  Blob backward(const Blob& grad_out, const LayerCache* cache, std::span<const double>,
                std::span<double>) const override {
    const auto& c = static_cast<const MaskCache&>(detail::require_cache(cache, "relu"));
    Blob grad(grad_out.shape());
    const auto dy = grad_out.data();
    auto dx = grad.data();
    for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = c.active[i] ? dy[i] : 0.0;
    return grad;
  }
};

// ---------------------------------------------------------------- dense

struct InputCache : LayerCache {
  Blob input;
};

// Frame-wise affine map with identity activation.
class DenseLayer final : public Layer {
 public:
  DenseLayer(const LayerSpec& spec, int in_features) : Layer(spec), in_features_(in_features) {
    if (spec.units < 1) throw ConfigError("dense layer needs at least one unit");
  }

  Shape output_shape(const Shape& in) const override {
    require_sequence(in, "dense");
    if (in.channels != in_features_) throw ConfigError("dense input width mismatch");
    return {spec().units, 1, in.width};
  }

  std::vector<ParamBlock> param_blocks() const override {
    return {{"weight", spec().units, in_features_}, {"bias", spec().units, 1}};
  }

  void init(std::span<double> params, std::span<double>, Rng& rng) const override {
    const std::size_t nw = static_cast<std::size_t>(spec().units) * in_features_;
    detail::glorot_uniform(params.first(nw), in_features_, spec().units, rng);
    std::fill(params.begin() + nw, params.end(), 0.0);
  }

  Blob forward(const Blob& in, std::span<const double> params, std::span<const double>, Mode,
               std::unique_ptr<LayerCache>* cache) const override {
    const Shape out_shape = output_shape(in.shape());
    Eigen::Map<const RowMatrix> weight(params.data(), spec().units, in_features_);
    Eigen::Map<const Eigen::RowVectorXd> bias(params.data() + weight.size(), spec().units);
    Blob out(out_shape);
    auto y = out.frames();
    y.noalias() = in.frames() * weight.transpose();
    y.rowwise() += bias;
    if (cache) {
      auto c = std::make_unique<InputCache>();
      c->input = in;
      *cache = std::move(c);
    }
    return out;
  }

  Blob backward(const Blob& grad_out, const LayerCache* cache, std::span<const double> params,
                std::span<double> grad_params) const override {
    const auto& c = static_cast<const InputCache&>(detail::require_cache(cache, "dense"));
    Eigen::Map<const RowMatrix> weight(params.data(), spec().units, in_features_);
    Eigen::Map<RowMatrix> d_weight(grad_params.data(), spec().units, in_features_);
    Eigen::Map<Eigen::RowVectorXd> d_bias(grad_params.data() + d_weight.size(), spec().units);
    const auto dy = grad_out.frames();
    d_weight.noalias() += dy.transpose() * c.input.frames();
    d_bias += dy.colwise().sum();
    Blob grad(c.input.shape());
    grad.frames().noalias() = dy * weight;
    return grad;
  }

 private:
  int in_features_;
};

// ---------------------------------------------------------------- softmax

struct OutputCache : LayerCache {
  Blob output;
};

class SoftmaxLayer final : public Layer {
 public:
  explicit SoftmaxLayer(const LayerSpec& spec) : Layer(spec) {}

  Shape output_shape(const Shape& in) const override {
    require_sequence(in, "softmax");
    return in;
  }

  Blob forward(const Blob& in, std::span<const double>, std::span<const double>, Mode,
               std::unique_ptr<LayerCache>* cache) const override {
    output_shape(in.shape());
    Blob out(in.shape());
    auto y = out.frames();
    const auto x = in.frames();
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
      const double m = x.row(t).maxCoeff();
      y.row(t) = (x.row(t).array() - m).exp();
      y.row(t) /= y.row(t).sum();
    }
    if (cache) {
      auto c = std::make_unique<OutputCache>();
      c->output = out;
      *cache = std::move(c);
    }
    return out;
  }

  Blob backward(const Blob& grad_out, const LayerCache* cache, std::span<const double>,
                std::span<double>) const override {
    const auto& c = static_cast<const OutputCache&>(detail::require_cache(cache, "softmax"));
    const auto y = c.output.frames();
    const auto dy = grad_out.frames();
    Blob grad(grad_out.shape());
    const Eigen::VectorXd dot = (dy.array() * y.array()).rowwise().sum();
    grad.frames() = y.array() * (dy.array().colwise() - dot.array());
    return grad;
  }
};

}  // namespace

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, int in_channels) {
  if (in_channels < 1) throw ConfigError("layer input must have at least one channel");
  switch (spec.kind) {
    case LayerKind::conv: return std::make_unique<ConvLayer>(spec, in_channels);
    case LayerKind::pool: return std::make_unique<PoolLayer>(spec);
    case LayerKind::batchnorm: return std::make_unique<BatchNormLayer>(spec, in_channels);
    case LayerKind::relu: return std::make_unique<ReluLayer>(spec);
    case LayerKind::blstm: return detail::make_blstm(spec, in_channels);
    case LayerKind::dense: return std::make_unique<DenseLayer>(spec, in_channels);
    case LayerKind::softmax: return std::make_unique<SoftmaxLayer>(spec);
  }
  throw ConfigError("unknown layer kind");
}

}  // namespace fcrn
