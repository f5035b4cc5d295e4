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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "fcrn/error.hpp"
#include "fcrn/ink.hpp"
#include "fcrn/synth.hpp"

namespace fcrn {
namespace {

TEST(Rng, IsAPureFunctionOfTheSeed) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
    EXPECT_LT(u.below(7), 7u);
  }
}

TEST(SynthGlyph, Deterministic) {
  EXPECT_EQ(synth_glyph(3, 99), synth_glyph(3, 99));
}

TEST(SynthGlyph, DifferentSeedsKeepStrokeCount) {
  for (int s = 1; s <= 10; ++s) {
    const auto a = synth_glyph(s, 1);
    const auto b = synth_glyph(s, 2);
    EXPECT_NE(a, b);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].points.size(), b[k].points.size());
  }
}

TEST(SynthGlyph, JitterStaysWithinTenPercent) {
  for (int s = 1; s <= 20; ++s) {
    const auto& tmpl = synth::glyph_template(s);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto g = synth_glyph(s, seed);
      for (std::size_t k = 0; k < g.size(); ++k) {
        for (std::size_t i = 0; i < g[k].points.size(); ++i) {
          const double dx = g[k].points[i].x / synth::kGlyphHeight - tmpl[k].points[i].x;
          const double dy = g[k].points[i].y / synth::kGlyphHeight - tmpl[k].points[i].y;
          EXPECT_LE(std::hypot(dx, dy), synth::kJitterBound + 1e-12);
        }
      }
    }
  }
}

TEST(SynthGlyph, TemplatesAreFartherApartThanTheJitter) {
  for (int n : {10, 100}) {
    for (int a = 1; a <= n; ++a) {
      for (int b = a + 1; b <= n; ++b) {
        EXPECT_GT(synth::template_distance(synth::glyph_template(a), synth::glyph_template(b)),
                  synth::kJitterBound)
            << a << " vs " << b;
      }
    }
  }
}

double min_x(const std::vector<Stroke>& strokes) {
  double m = INFINITY;
  for (const auto& s : strokes)
    for (const auto& p : s.points) m = std::min(m, p.x);
  return m;
}

double max_x(const std::vector<Stroke>& strokes) {
  double m = -INFINITY;
  for (const auto& s : strokes)
    for (const auto& p : s.points) m = std::max(m, p.x);
  return m;
}

TEST(SynthLine, GlyphsAdvanceLeftToRightWithBoundedGaps) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Label label{1, 2};
    const auto line = synth_line(label, seed);
    EXPECT_EQ(line.label, label);
    const auto na = synth_glyph(1, glyph_seed(seed, 0)).size();
    const std::vector<Stroke> a(line.strokes.begin(), line.strokes.begin() + static_cast<long>(na));
    const std::vector<Stroke> b(line.strokes.begin() + static_cast<long>(na), line.strokes.end());
    const double gap = min_x(b) - max_x(a);
    EXPECT_GE(gap, 0.1 * synth::kNominalGlyphWidth - 1e-9);
    EXPECT_LE(gap, 0.5 * synth::kNominalGlyphWidth + 1e-9);
  }
}

TEST(SynthLine, SingleSymbolIsATranslatedGlyph) {
  const auto line = synth_line({4}, 17);
  const auto glyph = synth_glyph(4, glyph_seed(17, 0));
  ASSERT_EQ(line.strokes.size(), glyph.size());
  const double shift = line.strokes[0].points[0].x - glyph[0].points[0].x;
  for (std::size_t k = 0; k < glyph.size(); ++k) {
    for (std::size_t i = 0; i < glyph[k].points.size(); ++i) {
      EXPECT_NEAR(line.strokes[k].points[i].x - glyph[k].points[i].x, shift, 1e-9);
      EXPECT_EQ(line.strokes[k].points[i].y, glyph[k].points[i].y);
    }
  }
}

TEST(SynthLine, EmptyLabelIsRejected) {
  EXPECT_THROW(synth_line({}, 1), ConfigError);
}

TEST(SynthLine, ThousandLinesReReadWithoutLabelMismatch) {
  const auto alphabet = Alphabet::make_default(10);
  std::vector<Label> labels;
  Rng rng(8);
  MarkovSource source(10, 2);
  for (int i = 0; i < 1000; ++i) labels.push_back(source.sample_line(rng, 1 + static_cast<int>(rng.below(6))));
  const auto lines = synth_lines(labels, 3);
  const auto path = std::filesystem::temp_directory_path() / "fcrn_thousand.ink";
  save_ink(path, lines, alphabet);
  const auto back = load_ink(path, alphabet);
  std::filesystem::remove(path);
  ASSERT_EQ(back.size(), labels.size());
  int mismatches = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) mismatches += back[i].label != labels[i];
  EXPECT_EQ(mismatches, 0);
}

TEST(SynthCorpus, AccountingAndDeterminism) {
  const CorpusOptions opts;
  for (std::size_t n : {1u, 50u, 1000u}) {
    const auto corpus = synth_corpus(2, n, 7, opts);
    std::size_t total = 0;
    for (const auto& l : corpus) {
      total += l.size();
      EXPECT_GE(static_cast<int>(l.size()), opts.min_length);
      EXPECT_LE(static_cast<int>(l.size()), opts.max_length);
      for (int s : l) EXPECT_TRUE(s >= 1 && s <= opts.num_symbols);
    }
    EXPECT_GE(total, n);
    EXPECT_LT(total, n + static_cast<std::size_t>(opts.max_length));
    EXPECT_EQ(corpus, synth_corpus(2, n, 7, opts));
  }
  EXPECT_NE(synth_corpus(2, 100, 1), synth_corpus(2, 100, 2));
}

TEST(SynthCorpus, EmpiricalBigramsMatchTheSource) {
  const int n = 10;
  const MarkovSource source(n, 2);
  const auto corpus = synth_corpus(2, 100000, 11);
  std::map<int, std::vector<double>> counts;
  for (const auto& line : corpus) {
    int prev = 0;
    for (int s : line) {
      auto& row = counts[prev];
      row.resize(n, 0.0);
      row[s - 1] += 1;
      prev = s;
    }
  }
  for (auto& [ctx, row] : counts) {
    double total = 0;
    for (double c : row) total += c;
    const std::vector<int> context{ctx};
    const auto dist = source.distribution(context);
    double tv = 0;
    for (int s = 0; s < n; ++s) tv += std::abs(row[s] / total - dist[s]);
    EXPECT_LE(0.5 * tv, 0.05) << "context " << ctx;
  }
}

TEST(MarkovSource, RowsAreDistributions) {
  for (int order : {1, 2, 3}) {
    MarkovSource src(5, order);
    std::vector<int> ctx(order - 1, 0);
    for (int a = 0; a <= 5; ++a) {
      if (order > 1) ctx.back() = a;
      const auto row = src.distribution(ctx);
      double sum = 0;
      for (double p : row) {
        EXPECT_GT(p, 0);
        sum += p;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

}  // namespace
}  // namespace fcrn
