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

#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <vector>

#include "fcrn/ctc.hpp"
#include "fcrn/decoder.hpp"
#include "fcrn/ink.hpp"
#include "fcrn/model.hpp"
#include "fcrn/pathsig.hpp"
#include "fcrn/receptive_field.hpp"
#include "fcrn/synth.hpp"

namespace {

using namespace fcrn;

PosteriorSequence random_posteriors(int frames, int labels, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(frames, labels);
  for (int t = 0; t < frames; ++t) {
    for (int c = 0; c < labels; ++c) m(t, c) = rng.uniform(0.01, 1.0);
    m.row(t) /= m.row(t).sum();
  }
  return PosteriorSequence(m);
}

// Posteriors where each frame is dominated by one label, as after training.
PosteriorSequence peaked_posteriors(int frames, int labels, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(frames, labels, 1e-4);
  for (int t = 0; t < frames; ++t) {
    m(t, static_cast<int>(rng.below(labels))) = 0.9;
    m(t, static_cast<int>(rng.below(labels))) += 0.05;
    m.row(t) /= m.row(t).sum();
  }
  return PosteriorSequence(m);
}

void BM_PathSignature(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  Rng rng(1);
  std::vector<Point> pts(256);
  for (auto& p : pts) p = {rng.uniform(0, 100), rng.uniform(0, 100)};
  for (auto _ : state) benchmark::DoNotOptimize(path_signature(pts, level));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pts.size()));
}
BENCHMARK(BM_PathSignature)->DenseRange(0, 3);

void BM_Rasterize(benchmark::State& state) {
  const auto lines = synth_lines(synth_corpus(2, 40, 3), 4);
  RasterOptions opt;
  opt.level = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rasterize(lines.front(), opt));
}
BENCHMARK(BM_Rasterize)->Arg(0)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_CtcGradient(benchmark::State& state) {
  const int frames = static_cast<int>(state.range(0));
  const auto post = random_posteriors(frames, 11, 2);
  std::vector<int> label;
  for (int i = 0; i < frames / 3; ++i) label.push_back(1 + i % 10);
  for (auto _ : state) benchmark::DoNotOptimize(ctc_grad(post, label));
}
BENCHMARK(BM_CtcGradient)->Arg(35)->Arg(140)->Arg(560);

void BM_BeamSearch(benchmark::State& state) {
  const auto post = peaked_posteriors(static_cast<int>(state.range(0)), 11, 3);
  DecodeConfig cfg;
  cfg.beam_width = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(beam_search(post, nullptr, cfg));
}
BENCHMARK(BM_BeamSearch)->Args({35, 8})->Args({35, 32})->Args({140, 32})->Unit(benchmark::kMicrosecond);

void BM_ForwardCompact(benchmark::State& state) {
  const auto arch = build_architecture(architecture_preset("compact"), 11);
  Model model(arch, 7, 1);
  Blob x({7, 32, static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(model.forward_blob(x, Mode::eval));
}
BENCHMARK(BM_ForwardCompact)->Arg(144)->Arg(576)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
