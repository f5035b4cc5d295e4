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

#include <algorithm>
#include <cmath>

#include "fcrn/error.hpp"
#include "fcrn/synth.hpp"
#include "layers_internal.hpp"

namespace fcrn::detail {

namespace {

// Gate rows inside the 4H pre-activation, in this order.
enum Gate { kInput = 0, kForget = 1, kOutput = 2, kCandidate = 3 };

struct DirectionCache {
  Eigen::MatrixXd gates;  // T x 4H, after nonlinearities
  Eigen::MatrixXd cell;   // T x H
  Eigen::MatrixXd hidden; // T x H
};

struct BlstmCache : LayerCache {
  Blob input;
  DirectionCache dir[2];
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Bidirectional LSTM without peepholes: sigmoid input/forget/output gates and
// tanh candidate and cell output. Output frame t is [h_fwd(t); h_bwd(t)].
class BlstmLayer final : public Layer {
 public:
  BlstmLayer(const LayerSpec& spec, int in_features)
      : Layer(spec), in_(in_features), cells_(spec.units) {
    if (cells_ < 1) throw ConfigError("blstm needs at least one cell");
  }

  Shape output_shape(const Shape& in) const override {
    if (in.height != 1) {
      throw ConfigError("blstm needs a height-1 input but got height " + std::to_string(in.height));
    }
    if (in.channels != in_) throw ConfigError("blstm input width mismatch");
    return {2 * cells_, 1, in.width};
  }

  std::vector<ParamBlock> param_blocks() const override {
    std::vector<ParamBlock> blocks;
    for (const char* d : {"fwd", "bwd"}) {
      blocks.push_back({std::string(d) + ".w_input", 4 * cells_, in_});
      blocks.push_back({std::string(d) + ".w_recurrent", 4 * cells_, cells_});
      blocks.push_back({std::string(d) + ".bias", 4 * cells_, 1});
    }
    return blocks;
  }

  void init(std::span<double> params, std::span<double>, Rng& rng) const override {
    for (int d = 0; d < 2; ++d) {
      auto p = direction_params(params, d);
      glorot_uniform(p.first(wx_size()), in_, cells_, rng);
      glorot_uniform(p.subspan(wx_size(), wh_size()), cells_, cells_, rng);
      auto bias = p.subspan(wx_size() + wh_size());
      std::fill(bias.begin(), bias.end(), 0.0);
    }
  }

  Blob forward(const Blob& in, std::span<const double> params, std::span<const double>, Mode,
               std::unique_ptr<LayerCache>* cache) const override {
    const Shape out_shape = output_shape(in.shape());
    const auto x = in.frames();
    Blob out(out_shape);
    auto y = out.frames();
    auto c = std::make_unique<BlstmCache>();
    for (int d = 0; d < 2; ++d) {
      run_direction(x, direction_params(params, d), d == 1, c->dir[d]);
      y.middleCols(d * cells_, cells_) = c->dir[d].hidden;
    }
    if (cache) {
      c->input = in;
      *cache = std::move(c);
    }
    return out;
  }

  Blob backward(const Blob& grad_out, const LayerCache* cache, std::span<const double> params,
                std::span<double> grad_params) const override {
    const auto& c = static_cast<const BlstmCache&>(require_cache(cache, "blstm"));
    const auto x = c.input.frames();
    const auto dy = grad_out.frames();
    Blob grad(c.input.shape());
    auto dx = grad.frames();
    for (int d = 0; d < 2; ++d) {
      backprop_direction(x, dy.middleCols(d * cells_, cells_), direction_params(params, d),
                         direction_grads(grad_params, d), d == 1, c.dir[d], dx);
    }
    return grad;
  }

 private:
  std::size_t wx_size() const { return static_cast<std::size_t>(4 * cells_) * in_; }
  std::size_t wh_size() const { return static_cast<std::size_t>(4 * cells_) * cells_; }
  std::size_t direction_size() const { return wx_size() + wh_size() + 4 * static_cast<std::size_t>(cells_); }

  std::span<const double> direction_params(std::span<const double> p, int d) const {
    return p.subspan(d * direction_size(), direction_size());
  }
  std::span<double> direction_params(std::span<double> p, int d) const {
    return p.subspan(d * direction_size(), direction_size());
  }
  std::span<double> direction_grads(std::span<double> g, int d) const {
    return g.subspan(d * direction_size(), direction_size());
  }

  template <typename Frames>
  void run_direction(const Frames& x, std::span<const double> p, bool reverse, DirectionCache& out) const {
    const int T = static_cast<int>(x.rows());
    const int H = cells_;
    Eigen::Map<const RowMatrix> wx(p.data(), 4 * H, in_);
    Eigen::Map<const RowMatrix> wh(p.data() + wx_size(), 4 * H, H);
    Eigen::Map<const Eigen::RowVectorXd> bias(p.data() + wx_size() + wh_size(), 4 * H);

    Eigen::MatrixXd pre = x * wx.transpose();
    pre.rowwise() += bias;
    out.gates.resize(T, 4 * H);
    out.cell.resize(T, H);
    out.hidden.resize(T, H);
    Eigen::RowVectorXd h_prev = Eigen::RowVectorXd::Zero(H);
    Eigen::RowVectorXd c_prev = Eigen::RowVectorXd::Zero(H);
    Eigen::RowVectorXd a(4 * H);
    for (int step = 0; step < T; ++step) {
      const int t = reverse ? T - 1 - step : step;
      a.noalias() = pre.row(t) + h_prev * wh.transpose();
      for (int j = 0; j < 3 * H; ++j) a[j] = sigmoid(a[j]);
      for (int j = 3 * H; j < 4 * H; ++j) a[j] = std::tanh(a[j]);
      for (int j = 0; j < H; ++j) {
        const double cell = a[kForget * H + j] * c_prev[j] + a[kInput * H + j] * a[kCandidate * H + j];
        c_prev[j] = cell;
        h_prev[j] = a[kOutput * H + j] * std::tanh(cell);
      }
      out.gates.row(t) = a;
      out.cell.row(t) = c_prev;
      out.hidden.row(t) = h_prev;
    }
  }

  template <typename Frames, typename GradFrames, typename GradInput>
  void backprop_direction(const Frames& x, const GradFrames& dy, std::span<const double> p,
                          std::span<double> g, bool reverse, const DirectionCache& c,
                          GradInput& dx) const {
    const int T = static_cast<int>(x.rows());
    const int H = cells_;
    Eigen::Map<const RowMatrix> wx(p.data(), 4 * H, in_);
    Eigen::Map<const RowMatrix> wh(p.data() + wx_size(), 4 * H, H);
    Eigen::Map<RowMatrix> d_wx(g.data(), 4 * H, in_);
    Eigen::Map<RowMatrix> d_wh(g.data() + wx_size(), 4 * H, H);
    Eigen::Map<Eigen::RowVectorXd> d_bias(g.data() + wx_size() + wh_size(), 4 * H);

    Eigen::MatrixXd d_pre(T, 4 * H);
    Eigen::RowVectorXd dh_next = Eigen::RowVectorXd::Zero(H);
    Eigen::RowVectorXd dc_next = Eigen::RowVectorXd::Zero(H);
    Eigen::RowVectorXd da(4 * H);
    for (int step = T - 1; step >= 0; --step) {
      const int t = reverse ? T - 1 - step : step;
      const int t_prev = reverse ? t + 1 : t - 1;
      const bool has_prev = step > 0;
      const auto a = c.gates.row(t);
      for (int j = 0; j < H; ++j) {
        const double i = a[kInput * H + j];
        const double f = a[kForget * H + j];
        const double o = a[kOutput * H + j];
        const double cand = a[kCandidate * H + j];
        const double tc = std::tanh(c.cell(t, j));
        const double c_prev = has_prev ? c.cell(t_prev, j) : 0.0;
        const double dh = dy(t, j) + dh_next[j];
        const double dc = dh * o * (1.0 - tc * tc) + dc_next[j];
        da[kInput * H + j] = dc * cand * i * (1.0 - i);
        da[kForget * H + j] = dc * c_prev * f * (1.0 - f);
        da[kOutput * H + j] = dh * tc * o * (1.0 - o);
        da[kCandidate * H + j] = dc * i * (1.0 - cand * cand);
        dc_next[j] = dc * f;
      }
      d_pre.row(t) = da;
      if (has_prev) d_wh.noalias() += da.transpose() * c.hidden.row(t_prev);
      dh_next.noalias() = da * wh;
    }
    d_wx.noalias() += d_pre.transpose() * x;
    d_bias += d_pre.colwise().sum();
    dx.noalias() += d_pre * wx;
  }

  int in_;
  int cells_;
};

}  // namespace

std::unique_ptr<Layer> make_blstm(const LayerSpec& spec, int in_features) {
  return std::make_unique<BlstmLayer>(spec, in_features);
}

}  // namespace fcrn::detail
