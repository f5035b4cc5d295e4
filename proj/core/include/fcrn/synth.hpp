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

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fcrn/ink.hpp"

namespace fcrn {

// Deterministic generator of unsigned 64-bit words and unit uniforms. Wraps
// mt19937_64 but draws uniforms from raw bits so sequences do not depend on
// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  // Standard normal (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

namespace synth {

// Synthetic glyphs are drawn at this height in ink pixels.
inline constexpr double kGlyphHeight = 100.0;
// Horizontal advance unit used for inter-glyph gaps.
inline constexpr double kNominalGlyphWidth = 60.0;
// Maximum per-point displacement, as a fraction of glyph height.
inline constexpr double kJitterBound = 0.1;

// Unperturbed polyline template of a symbol in unit-height coordinates
// (y grows downward). Templates are fixed; symbols past the built-in set are
// drawn once from a constant seed with a minimum-separation rejection rule.
const std::vector<Stroke>& glyph_template(int symbol);

// Mean distance between corresponding points of two glyphs after resampling
// their pen paths (strokes joined in order) to 64 equally spaced points.
double template_distance(std::span<const Stroke> a, std::span<const Stroke> b);

}  // namespace synth

// Template of `symbol` perturbed by seeded jitter, scaled to kGlyphHeight.
std::vector<Stroke> synth_glyph(int symbol, std::uint64_t seed);

// Seed used for the glyph at `position` of a line generated with `line_seed`.
std::uint64_t glyph_seed(std::uint64_t line_seed, std::size_t position);

TextLineSample synth_line(const Label& label, std::uint64_t seed);

// Fixed Markov source over symbols 1..num_symbols. The conditional rows are
// drawn from a constant seed so every corpus of the same shape shares them.
class MarkovSource {
 public:
  MarkovSource(int num_symbols, int order);

  int order() const noexcept { return order_; }
  int num_symbols() const noexcept { return num_symbols_; }

  // Next-symbol distribution (entry i is symbol i + 1) given the last
  // order - 1 symbols. 0 stands for the line-start padding.
  std::span<const double> distribution(std::span<const int> context) const;

  Label sample_line(Rng& rng, int length) const;

 private:
  std::size_t context_id(std::span<const int> context) const;

  int num_symbols_;
  int order_;
  std::vector<double> table_;
};

struct CorpusOptions {
  int num_symbols = 10;
  int min_length = 3;
  int max_length = 8;
};

// Label sequences from MarkovSource(num_symbols, order) totalling at least
// n_chars symbols (at most n_chars + max_length - 1).
std::vector<Label> synth_corpus(int order, std::size_t n_chars, std::uint64_t seed,
                                const CorpusOptions& options = {});

// One synthetic line per label, seeded per index.
std::vector<TextLineSample> synth_lines(const std::vector<Label>& labels, std::uint64_t seed);

}  // namespace fcrn
