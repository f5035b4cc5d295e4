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

#include "fcrn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fcrn/error.hpp"

namespace fcrn {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace synth {

namespace {

constexpr std::uint64_t kTemplateSeed = 0x5eed7e3a11ULL;
constexpr double kMinRandomSeparation = 0.25;
constexpr int kResamplePoints = 64;

using Poly = std::vector<Point>;

std::vector<Stroke> strokes(std::initializer_list<Poly> polys) {
  std::vector<Stroke> out;
  for (const auto& p : polys) out.push_back(Stroke{p});
  return out;
}

std::vector<std::vector<Stroke>> builtin_templates() {
  std::vector<std::vector<Stroke>> t;
  // Closed loop.
  Poly loop;
  for (int i = 0; i <= 8; ++i) {
    const double a = -std::numbers::pi / 2 + 2 * std::numbers::pi * i / 8;
    loop.push_back({0.3 + 0.28 * std::cos(a), 0.5 + 0.48 * std::sin(a)});
  }
  t.push_back(strokes({loop}));
  t.push_back(strokes({{{0.05, 0.25}, {0.25, 0.0}, {0.25, 1.0}}}));
  t.push_back(strokes({{{0.05, 0.2}, {0.3, 0.0}, {0.55, 0.15}, {0.5, 0.4}, {0.05, 1.0}, {0.6, 1.0}}}));
  t.push_back(strokes({{{0.05, 0.05}, {0.5, 0.05}, {0.25, 0.45}, {0.55, 0.7}, {0.4, 0.95}, {0.05, 0.9}}}));
  t.push_back(strokes({{{0.45, 1.0}, {0.45, 0.0}, {0.0, 0.65}, {0.6, 0.65}}}));
  t.push_back(strokes({{{0.55, 0.0}, {0.1, 0.0}, {0.05, 0.45}, {0.45, 0.45}, {0.55, 0.75}, {0.35, 1.0}, {0.0, 0.9}}}));
  t.push_back(strokes({{{0.0, 0.0}, {0.6, 1.0}}, {{0.6, 0.0}, {0.0, 1.0}}}));
  t.push_back(strokes({{{0.0, 0.0}, {0.6, 0.0}, {0.2, 1.0}}}));
  t.push_back(strokes({{{0.3, 0.0}, {0.3, 1.0}}, {{0.0, 0.4}, {0.6, 0.4}}}));
  t.push_back(strokes({{{0.0, 0.0}, {0.15, 1.0}, {0.35, 0.3}, {0.55, 1.0}, {0.7, 0.0}}}));
  return t;
}

std::vector<Stroke> random_template(Rng& rng) {
  const int num_strokes = 1 + static_cast<int>(rng.below(2));
  std::vector<Stroke> out;
  for (int s = 0; s < num_strokes; ++s) {
    Stroke stroke;
    const int n = 3 + static_cast<int>(rng.below(3));
    for (int i = 0; i < n; ++i) stroke.points.push_back({rng.uniform(0.0, 0.7), rng.uniform(0.0, 1.0)});
    out.push_back(std::move(stroke));
  }
  return out;
}

std::vector<std::vector<Stroke>> build_templates() {
  auto templates = builtin_templates();
  Rng rng(kTemplateSeed);
  while (static_cast<int>(templates.size()) < Alphabet::kMaxSymbols) {
    auto candidate = random_template(rng);
    bool separated = std::all_of(templates.begin(), templates.end(), [&](const auto& other) {
      return template_distance(candidate, other) > kMinRandomSeparation;
    });
    if (separated) templates.push_back(std::move(candidate));
  }
  return templates;
}

std::vector<Point> resample_pen_path(std::span<const Stroke> glyph, int count) {
  std::vector<Point> path;
  for (const auto& s : glyph) path.insert(path.end(), s.points.begin(), s.points.end());
  std::vector<Point> out;
  if (path.empty()) return out;
  std::vector<double> cumulative(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + std::hypot(path[i].x - path[i - 1].x, path[i].y - path[i - 1].y);
  }
  const double total = cumulative.back();
  std::size_t seg = 1;
  for (int k = 0; k < count; ++k) {
    const double target = total * k / (count - 1);
    while (seg + 1 < path.size() && cumulative[seg] < target) ++seg;
    if (path.size() == 1 || total == 0.0) {
      out.push_back(path.front());
      continue;
    }
    const double len = cumulative[seg] - cumulative[seg - 1];
    const double f = len > 0.0 ? std::clamp((target - cumulative[seg - 1]) / len, 0.0, 1.0) : 0.0;
    const auto& a = path[seg - 1];
    const auto& b = path[seg];
    out.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
  }
  return out;
}

}  // namespace

const std::vector<Stroke>& glyph_template(int symbol) {
  static const auto templates = build_templates();
  if (symbol < 1 || symbol > static_cast<int>(templates.size())) {
    throw AlphabetError("no glyph template for symbol " + std::to_string(symbol));
  }
  return templates[symbol - 1];
}

double template_distance(std::span<const Stroke> a, std::span<const Stroke> b) {
  const auto pa = resample_pen_path(a, kResamplePoints);
  const auto pb = resample_pen_path(b, kResamplePoints);
  if (pa.empty() || pb.empty()) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < kResamplePoints; ++i) sum += std::hypot(pa[i].x - pb[i].x, pa[i].y - pb[i].y);
  return sum / kResamplePoints;
}

}  // namespace synth

std::vector<Stroke> synth_glyph(int symbol, std::uint64_t seed) {
  const auto& tmpl = synth::glyph_template(symbol);
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(symbol)));
  // Square of half-side bound / sqrt(2) keeps every offset within the bound.
  const double half = synth::kJitterBound / std::numbers::sqrt2;
  std::vector<Stroke> out;
  out.reserve(tmpl.size());
  for (const auto& stroke : tmpl) {
    Stroke s;
    s.points.reserve(stroke.points.size());
    for (const auto& p : stroke.points) {
      const double dx = rng.uniform(-half, half);
      const double dy = rng.uniform(-half, half);
      s.points.push_back({(p.x + dx) * synth::kGlyphHeight, (p.y + dy) * synth::kGlyphHeight});
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::uint64_t glyph_seed(std::uint64_t line_seed, std::size_t position) {
  return mix_seed(line_seed, 0x100000 + position);
}

TextLineSample synth_line(const Label& label, std::uint64_t seed) {
  if (label.empty()) throw ConfigError("synth_line needs a non-empty label");
  TextLineSample sample;
  sample.label = label;
  Rng gaps(mix_seed(seed, 0xa11));
  double cursor = 0.0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    auto glyph = synth_glyph(label[i], glyph_seed(seed, i));
    double min_x = glyph.front().points.front().x;
    double max_x = min_x;
    for (const auto& s : glyph) {
      for (const auto& p : s.points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
      }
    }
    const double shift = cursor - min_x;
    for (auto& s : glyph) {
      for (auto& p : s.points) p.x += shift;
      sample.strokes.push_back(std::move(s));
    }
    cursor += (max_x - min_x) + gaps.uniform(0.1, 0.5) * synth::kNominalGlyphWidth;
  }
  return sample;
}

MarkovSource::MarkovSource(int num_symbols, int order) : num_symbols_(num_symbols), order_(order) {
  if (num_symbols < 1) throw ConfigError("Markov source needs at least one symbol");
  if (order < 1 || order > 3) throw ConfigError("Markov source order must be 1, 2 or 3");
  std::size_t contexts = 1;
  for (int i = 1; i < order; ++i) contexts *= static_cast<std::size_t>(num_symbols + 1);
  table_.resize(contexts * num_symbols);
  Rng rng(mix_seed(0xc0ffeeULL, static_cast<std::uint64_t>(num_symbols * 8 + order)));
  for (std::size_t c = 0; c < contexts; ++c) {
    double* row = &table_[c * num_symbols];
    double total = 0.0;
    for (int s = 0; s < num_symbols; ++s) {
      const double u = rng.uniform();
      row[s] = 0.02 + u * u * u;
      total += row[s];
    }
    for (int s = 0; s < num_symbols; ++s) row[s] /= total;
  }
}

std::size_t MarkovSource::context_id(std::span<const int> context) const {
  std::size_t id = 0;
  const int need = order_ - 1;
  for (int i = 0; i < need; ++i) {
    // Missing history on the left is line-start padding.
    const int pos = static_cast<int>(context.size()) - need + i;
    const int sym = pos >= 0 ? context[pos] : 0;
    if (sym < 0 || sym > num_symbols_) throw AlphabetError("context symbol out of range");
    id = id * static_cast<std::size_t>(num_symbols_ + 1) + static_cast<std::size_t>(sym);
  }
  return id;
}

std::span<const double> MarkovSource::distribution(std::span<const int> context) const {
  return {&table_[context_id(context) * num_symbols_], static_cast<std::size_t>(num_symbols_)};
}

Label MarkovSource::sample_line(Rng& rng, int length) const {
  Label line;
  line.reserve(length);
  for (int i = 0; i < length; ++i) {
    auto row = distribution(line);
    double u = rng.uniform();
    int chosen = num_symbols_;
    for (int s = 0; s < num_symbols_; ++s) {
      u -= row[s];
      if (u < 0.0) {
        chosen = s + 1;
        break;
      }
    }
    line.push_back(chosen);
  }
  return line;
}

std::vector<Label> synth_corpus(int order, std::size_t n_chars, std::uint64_t seed,
                                const CorpusOptions& options) {
  if (options.min_length < 1 || options.max_length < options.min_length) {
    throw ConfigError("invalid corpus line length range");
  }
  MarkovSource source(options.num_symbols, order);
  Rng rng(mix_seed(seed, 0xc0));
  std::vector<Label> corpus;
  std::size_t total = 0;
  const auto span = static_cast<std::uint64_t>(options.max_length - options.min_length + 1);
  while (total < n_chars) {
    const int length = options.min_length + static_cast<int>(rng.below(span));
    corpus.push_back(source.sample_line(rng, length));
    total += static_cast<std::size_t>(length);
  }
  return corpus;
}

std::vector<TextLineSample> synth_lines(const std::vector<Label>& labels, std::uint64_t seed) {
  std::vector<TextLineSample> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out.push_back(synth_line(labels[i], mix_seed(seed, i)));
  return out;
}

}  // namespace fcrn
