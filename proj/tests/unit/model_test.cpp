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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "fcrn/adadelta.hpp"
#include "fcrn/checkpoint.hpp"
#include "fcrn/error.hpp"
#include "fcrn/model.hpp"
#include "fcrn/pathsig.hpp"
#include "fcrn/receptive_field.hpp"
#include "test_support.hpp"

namespace fcrn {
namespace {

std::vector<LayerSpec> table_two_spatial() {
  return spatial_layers(build_architecture(architecture_preset("full"), 11));
}

TEST(ReceptiveField, SingleConv) {
  const std::vector<LayerSpec> c{LayerSpec::conv({3, 3}, {1, 1}, {0, 0}, 1)};
  EXPECT_EQ(receptive_field(c), (ReceptiveField{3, 3}));
}

TEST(ReceptiveField, StridedPair) {
  const std::vector<LayerSpec> c{LayerSpec::conv({2, 2}, {2, 2}, {0, 0}, 1),
                                 LayerSpec::conv({2, 2}, {1, 1}, {0, 0}, 1)};
  EXPECT_EQ(receptive_field(c), (ReceptiveField{4, 4}));
}

TEST(ReceptiveField, FullStack) {
  const auto chain = table_two_spatial();
  ASSERT_EQ(chain.size(), 10u);
  EXPECT_EQ(receptive_field(chain), (ReceptiveField{126, 62}));
  const auto table = receptive_field_table(chain);
  EXPECT_EQ(table.back().field, (ReceptiveField{126, 62}));
  EXPECT_EQ(table.back().jump, (Extent{48, 16}));
}

TEST(ReceptiveField, RejectsSequenceLayers) {
  const std::vector<LayerSpec> c{LayerSpec::conv({3, 3}, {1, 1}, {0, 0}, 1), LayerSpec::blstm(2)};
  EXPECT_THROW(receptive_field(c), ConfigError);
  EXPECT_THROW(field_position(c, 0, 0), ConfigError);
}

TEST(FieldPosition, IdentityAndSingleConv) {
  const std::vector<LayerSpec> id{LayerSpec::conv({1, 1}, {1, 1}, {0, 0}, 1)};
  EXPECT_DOUBLE_EQ(field_position(id, 3, 5).x, 5);
  const std::vector<LayerSpec> k3{LayerSpec::conv({3, 3}, {1, 1}, {0, 0}, 1)};
  EXPECT_DOUBLE_EQ(field_position(k3, 3, 5).x, 6);
  EXPECT_DOUBLE_EQ(field_position(k3, 3, 5).y, 4);
}

TEST(FieldPosition, FramesAreSixteenPixelsApart) {
  const auto chain = table_two_spatial();
  for (int t = 0; t < 10; ++t) {
    EXPECT_DOUBLE_EQ(field_position(chain, 0, t + 1).x - field_position(chain, 0, t).x, 16.0);
  }
}

// Floor-mode arithmetic written out layer by layer.
int out_size(int in, int k, int s, int p) { return (in + 2 * p - k) / s + 1; }

TEST(OutputShape, FullOn128By576) {
  int h = 128, w = 576;
  for (int b = 0; b < 4; ++b) {
    h = out_size(h, 3, 1, 0), w = out_size(w, 3, 1, 1);
    h = out_size(h, 2, 2, 0), w = out_size(w, 2, 2, 0);
  }
  h = out_size(h, 3, 3, 0), w = out_size(w, 1, 1, 0);
  h = out_size(h, 2, 1, 0), w = out_size(w, 2, 1, 0);
  EXPECT_EQ(h, 1);
  EXPECT_EQ(w, 35);
  const auto full = build_architecture(architecture_preset("full"), 11);
  const auto s = output_shape(full, 128, 576);
  EXPECT_EQ(s.height, 1);
  EXPECT_EQ(s.frames, 35);
}

TEST(OutputShape, ForwardAgreesWithArithmetic) {
  // Full geometry with desk channel widths keeps the run cheap.
  const auto chain = spatial_layers(build_architecture(architecture_preset("desk"), 11));
  Model m(chain, 1, 3);
  Blob x({1, 128, 576});
  const Blob y = m.forward_blob(x, Mode::eval);
  EXPECT_EQ(y.height(), 1);
  EXPECT_EQ(y.width(), 35);
}

// The recurrence ignores padding, so the exact 1x1 correspondence holds for
// the unpadded chain; width padding only adds output columns.
TEST(OutputShape, ReceptiveFieldInputGivesOneByOne) {
  for (const char* preset : {"desk", "compact", "micro"}) {
    auto chain = spatial_layers(build_architecture(architecture_preset(preset), 11));
    const auto rf = receptive_field(chain);
    const auto padded = output_shape(chain, rf.height, rf.width);
    EXPECT_EQ(padded.height, 1) << preset;
    EXPECT_GE(padded.width, 1) << preset;
    for (auto& l : chain) l.padding = {0, 0};
    EXPECT_EQ(receptive_field(chain), rf);
    const auto s = output_shape(chain, rf.height, rf.width);
    EXPECT_EQ(s.height, 1) << preset;
    EXPECT_EQ(s.width, 1) << preset;
    EXPECT_THROW(output_shape(chain, rf.height, rf.width - 1), ConfigError) << preset;
    Model m(chain, 1, 1);
    const Blob y = m.forward_blob(Blob({1, rf.height, rf.width}), Mode::eval);
    EXPECT_EQ(y.height(), 1);
    EXPECT_EQ(y.width(), 1);
  }
}

TEST(OutputShape, Errors) {
  const auto full = build_architecture(architecture_preset("desk"), 11);
  EXPECT_THROW(output_shape(full, 128, 8), ConfigError);
  EXPECT_THROW(output_shape(full, 64, 600), ConfigError);
}

TEST(Presets, FullHasReferenceWidths) {
  const auto cfg = architecture_preset("full");
  EXPECT_EQ(cfg.conv_channels, (std::vector<int>{64, 128, 256, 256, 512, 512}));
  EXPECT_EQ(cfg.blstm_cells, 1024);
  EXPECT_EQ(cfg.blstm_layers, 3);
  EXPECT_EQ(cfg.hidden_dense, (std::vector<int>{2048, 2048}));
  EXPECT_EQ(cfg.batchnorm_layers, 4);
  const auto chain = build_architecture(cfg, 11);
  int bn = 0, conv = 0, bn_after_conv = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    conv += chain[i].kind == LayerKind::conv;
    if (chain[i].kind == LayerKind::batchnorm) {
      ++bn;
      bn_after_conv += chain[i - 1].kind == LayerKind::conv && conv > 2;
    }
  }
  EXPECT_EQ(bn, 4);
  EXPECT_EQ(bn_after_conv, 4);
  EXPECT_THROW(architecture_preset("huge"), ConfigError);
}

Model micro_model(int level, std::uint64_t seed = 5) {
  return Model(build_architecture(architecture_preset("micro"), 3), static_cast<int>(signature_dim(level)), seed);
}

FeatureMaps random_maps(int c, int h, int w, Rng& rng) {
  FeatureMaps m(c, h, w);
  for (double& v : m.values()) v = rng.uniform(-1, 1);
  return m;
}

std::span<double> layer_params_mut(Model& m, std::size_t layer) {
  std::size_t offset = 0;
  for (std::size_t i = 0; i < layer; ++i) offset += m.layer(i).num_params();
  return m.params().subspan(offset, m.layer(layer).num_params());
}

TEST(Forward, RowsAreDistributions) {
  Rng rng(4);
  const auto m = micro_model(2);
  const auto post = m.forward(random_maps(7, 16, 30, rng), Mode::eval);
  EXPECT_EQ(post.frames(), 14);
  EXPECT_EQ(post.labels(), 3);
  for (int t = 0; t < post.frames(); ++t) {
    EXPECT_NEAR(post.matrix().row(t).sum(), 1.0, 1e-9);
    for (int c = 0; c < post.labels(); ++c) EXPECT_TRUE(post(t, c) >= 0 && post(t, c) <= 1);
  }
}

TEST(Forward, ZeroFinalDenseGivesUniformRows) {
  Rng rng(4);
  auto m = micro_model(2);
  const std::size_t dense = m.num_layers() - 2;
  ASSERT_EQ(m.architecture()[dense].kind, LayerKind::dense);
  for (double& p : layer_params_mut(m, dense)) p = 0;
  const auto post = m.forward(random_maps(7, 16, 20, rng), Mode::eval);
  for (int t = 0; t < post.frames(); ++t)
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(post(t, c), 1.0 / 3, 1e-15);
}

TEST(Forward, SoftmaxShiftInvariance) {
  Rng rng(6);
  auto m = micro_model(1);
  const auto maps = random_maps(3, 16, 20, rng);
  const auto before = m.forward(maps, Mode::eval);
  auto p = layer_params_mut(m, m.num_layers() - 2);
  for (std::size_t i = p.size() - 3; i < p.size(); ++i) p[i] += 2.5;  // bias block
  const auto after = m.forward(maps, Mode::eval);
  EXPECT_LT((before.matrix() - after.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Forward, DeterministicAcrossRuns) {
  Rng rng(6);
  const auto maps = random_maps(7, 16, 24, rng);
  const auto a = micro_model(2, 9).forward(maps, Mode::train);
  const auto b = micro_model(2, 9).forward(maps, Mode::train);
  EXPECT_EQ(a.matrix(), b.matrix());
  EXPECT_NE(a.matrix(), micro_model(2, 10).forward(maps, Mode::train).matrix());
}

TEST(Forward, ChannelMismatchThrows) {
  Rng rng(1);
  EXPECT_THROW(micro_model(2).forward(random_maps(3, 16, 20, rng), Mode::eval), ConfigError);
}

TEST(Backward, ZeroUpstreamGradientGivesZeroGradients) {
  Rng rng(2);
  const auto m = micro_model(1);
  ForwardCache cache;
  const auto post = m.forward(random_maps(3, 16, 20, rng), Mode::train, &cache);
  const auto g = m.backward(cache, Eigen::MatrixXd::Zero(post.frames(), post.labels()));
  EXPECT_EQ(g.size(), static_cast<Eigen::Index>(m.params().size()));
  EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(m.backward(ForwardCache{}, Eigen::MatrixXd::Zero(post.frames(), post.labels())), Error);
}

TEST(Checkpoint, RoundTripPreservesEverything) {
  Rng rng(3);
  auto m = micro_model(2, 8);
  for (double& b : m.buffers()) b += rng.uniform(0, 0.1);
  CheckpointMeta meta{{"a", "b"}, 2, 4, 16, 8, 123};
  const auto path = std::filesystem::temp_directory_path() / "fcrn_ckpt_test.ckpt";
  save_checkpoint(path, m, meta);
  const auto back = load_checkpoint(path);
  EXPECT_EQ(back.model.architecture(), m.architecture());
  EXPECT_TRUE(std::equal(m.params().begin(), m.params().end(), back.model.params().begin()));
  EXPECT_TRUE(std::equal(m.buffers().begin(), m.buffers().end(), back.model.buffers().begin()));
  EXPECT_EQ(back.meta.alphabet, meta.alphabet);
  EXPECT_EQ(back.meta.iteration, 123u);
  EXPECT_EQ(back.meta.signature_level, 2);
  const auto maps = random_maps(7, 16, 20, rng);
  EXPECT_EQ(m.forward(maps, Mode::eval).matrix(), back.model.forward(maps, Mode::eval).matrix());

  auto blob = path;
  blob += ".bin";
  const auto size = std::filesystem::file_size(blob);
  {
    std::ofstream extra(blob, std::ios::binary | std::ios::app);
    extra << "x";
  }
  EXPECT_THROW(load_checkpoint(path), Error);
  std::filesystem::resize_file(blob, size - 8);
  EXPECT_THROW(load_checkpoint(path), Error);
  std::filesystem::remove(path);
  std::filesystem::remove(blob);
  EXPECT_THROW(load_checkpoint(path), Error);
}

TEST(AdaDelta, ZeroGradientLeavesParamsUnchanged) {
  AdaDelta opt(3);
  std::vector<double> p{1, -2, 3};
  const std::vector<double> g(3, 0.0);
  EXPECT_TRUE(opt.step(p, g));
  EXPECT_EQ(p, (std::vector<double>{1, -2, 3}));
}

TEST(AdaDelta, ScalarTraceOfTheRecurrences) {
  const double rho = 0.9, eps = 1e-6, g = 0.5;
  AdaDelta opt(1, {rho, eps, 1.0});
  std::vector<double> p{0.0};
  double eg = 0, edx = 0, x = 0;
  double prev = 0;
  for (int i = 0; i < 2; ++i) {
    ASSERT_TRUE(opt.step(p, std::vector<double>{g}));
    eg = rho * eg + (1 - rho) * g * g;
    const double dx = -std::sqrt(edx + eps) / std::sqrt(eg + eps) * g;
    edx = rho * edx + (1 - rho) * dx * dx;
    x += dx;
    EXPECT_NEAR(p[0], x, 1e-15);
    EXPECT_LT(p[0], prev);
    prev = p[0];
  }
  EXPECT_NEAR(opt.mean_sq_grad()[0], eg, 1e-18);
  EXPECT_NEAR(opt.mean_sq_update()[0], edx, 1e-18);
}

TEST(AdaDelta, AccumulatorsStayNonNegative) {
  Rng rng(5);
  AdaDelta opt(10);
  std::vector<double> p(10, 0.0), g(10);
  for (int i = 0; i < 1000; ++i) {
    for (double& v : g) v = rng.normal() * 10;
    ASSERT_TRUE(opt.step(p, g));
    for (std::size_t j = 0; j < 10; ++j) {
      ASSERT_GE(opt.mean_sq_grad()[j], 0.0);
      ASSERT_GE(opt.mean_sq_update()[j], 0.0);
      ASSERT_TRUE(std::isfinite(p[j]));
    }
  }
}

TEST(AdaDelta, NonFiniteGradientIsRejected) {
  AdaDelta opt(2);
  std::vector<double> p{1, 2};
  EXPECT_FALSE(opt.step(p, std::vector<double>{0.1, std::numeric_limits<double>::quiet_NaN()}));
  EXPECT_FALSE(opt.step(p, std::vector<double>{std::numeric_limits<double>::infinity(), 0.1}));
  EXPECT_EQ(p, (std::vector<double>{1, 2}));
  EXPECT_EQ(opt.steps(), 0u);
  EXPECT_EQ(opt.mean_sq_grad()[0], 0.0);
}

}  // namespace
}  // namespace fcrn
