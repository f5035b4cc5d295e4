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
#include <map>
#include <set>

#include "fcrn/ctc.hpp"
#include "fcrn/decoder.hpp"
#include "fcrn/error.hpp"
#include "fcrn/langmodel.hpp"
#include "test_support.hpp"

namespace fcrn {
namespace {

using testing::for_each_sequence;
using testing::naive_collapse;
using testing::random_posteriors;
using testing::transcription_table;

PosteriorSequence rows(std::initializer_list<std::initializer_list<double>> r) {
  Eigen::MatrixXd m(r.size(), r.begin()->size());
  int t = 0;
  for (const auto& row : r) {
    int c = 0;
    for (double v : row) m(t, c++) = v;
    ++t;
  }
  return PosteriorSequence(m);
}

DecodeConfig exhaustive() {
  DecodeConfig cfg;
  cfg.threshold = 0;
  cfg.beam_width = 10000;
  cfg.lm_weight = 0;
  return cfg;
}

TEST(Candidates, Thresholding) {
  const auto p = rows({{0.7, 0.2, 0.1}, {0.998, 0.001, 0.001}});
  EXPECT_EQ(frame_candidates(p, 0.0)[0], (CandidateSet{0, 1, 2}));
  EXPECT_EQ(frame_candidates(p, 0.15)[0], (CandidateSet{0, 1}));
  EXPECT_EQ(frame_candidates(p, 0.999)[0], (CandidateSet{0}));
  EXPECT_EQ(frame_candidates(p, 0.999)[1], (CandidateSet{0}));
}

TEST(Regions, SplitOnBlankOnlyFrames) {
  const std::vector<CandidateSet> c{{0}, {1}, {1, 2}, {0}, {3}};
  EXPECT_EQ(split_regions(c), (std::vector<Region>{{1, 3}, {4, 5}}));
  const std::vector<CandidateSet> none{{0, 1}, {2}};
  EXPECT_EQ(split_regions(none), (std::vector<Region>{{0, 2}}));
  const std::vector<CandidateSet> all{{0}, {0}};
  EXPECT_TRUE(split_regions(all).empty());
}

TEST(RegionPaths, SingleFrame) {
  const auto p = rows({{0.1, 0.5, 0.4}});
  const std::vector<CandidateSet> c{{1, 2}};
  const auto r = region_paths({0, 1}, c, p, {});
  ASSERT_EQ(r.paths.size(), 2u);
  EXPECT_EQ(r.paths[0].labels, (Transcription{1}));
  EXPECT_NEAR(r.paths[0].log_prob, std::log(0.5), 1e-15);
  EXPECT_NEAR(r.paths[1].log_prob, std::log(0.4), 1e-15);
  EXPECT_FALSE(r.fallback);
}

TEST(RegionPaths, RepeatCollapses) {
  const auto p = rows({{0.1, 0.9}, {0.3, 0.7}});
  const std::vector<CandidateSet> c{{1}, {1}};
  const auto r = region_paths({0, 2}, c, p, {});
  ASSERT_EQ(r.paths.size(), 1u);
  EXPECT_EQ(r.paths[0].labels, (Transcription{1}));
  EXPECT_NEAR(r.paths[0].log_prob, std::log(0.9 * 0.7), 1e-15);
}

TEST(RegionPaths, PoolingMatchesEnumeration) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int T = 1 + static_cast<int>(rng.below(5));
    const auto p = random_posteriors(T, 4, rng);
    const auto cands = frame_candidates(p, 0.2);
    const Region region{0, T};
    // oracle: enumerate the product of candidate sets directly
    std::map<Transcription, double> pooled;
    std::vector<int> sizes;
    for (const auto& c : cands) sizes.push_back(static_cast<int>(c.size()));
    std::vector<int> idx(T, 0);
    while (true) {
      std::vector<int> a(T);
      double prob = 1;
      for (int t = 0; t < T; ++t) {
        a[t] = cands[t][idx[t]];
        prob *= p(t, a[t]);
      }
      pooled[naive_collapse(a)] += prob;
      int t = T - 1;
      while (t >= 0 && idx[t] == sizes[t] - 1) idx[t--] = 0;
      if (t < 0) break;
      ++idx[t];
    }
    const auto r = region_paths(region, cands, p, {});
    ASSERT_EQ(r.paths.size(), pooled.size());
    for (const auto& path : r.paths) {
      ASSERT_TRUE(pooled.count(path.labels));
      EXPECT_NEAR(std::exp(path.log_prob), pooled[path.labels], 1e-12);
    }
  }
}

TEST(RegionPaths, FallsBackToABeamPastTheCap) {
  Rng rng(4);
  const auto p = random_posteriors(8, 4, rng);
  const auto cands = frame_candidates(p, 0.0);
  DecodeConfig cfg;
  cfg.enumeration_cap = 100;
  cfg.beam_width = 5;
  const auto r = region_paths({0, 8}, cands, p, cfg);
  EXPECT_TRUE(r.fallback);
  EXPECT_LE(r.paths.size(), 5u);
  const auto table = transcription_table(p);
  for (const auto& path : r.paths) EXPECT_LE(std::exp(path.log_prob), table.at(path.labels) * (1 + 1e-12));
}

// Concatenating collapsed region partials equals collapsing the concatenated
// alignment when regions are separated by blanks.
TEST(Regions, SeparatorsMakeRegionsIndependent) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> a, b;
    for (int i = 0; i < 4; ++i) a.push_back(static_cast<int>(rng.below(3)));
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<int>(rng.below(3)));
    std::vector<int> joined = a;
    joined.push_back(0);
    joined.insert(joined.end(), b.begin(), b.end());
    auto expected = collapse(a);
    const auto right = collapse(b);
    expected.insert(expected.end(), right.begin(), right.end());
    EXPECT_EQ(collapse(joined), expected);
  }
}

TEST(BeamSearch, EqualsExhaustiveArgmaxWithoutLm) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_posteriors(4, 3, rng);
    const auto table = transcription_table(p);
    auto best = table.begin();
    for (auto it = table.begin(); it != table.end(); ++it)
      if (it->second > best->second) best = it;
    const auto got = beam_search(p, nullptr, exhaustive());
    EXPECT_EQ(got.best.labels, best->first);
    EXPECT_NEAR(std::exp(got.best.acoustic), best->second, 1e-12);
  }
}

TEST(BeamSearch, FixesTheGreedyFailure) {
  const auto p = rows({{0.6, 0.4}, {0.6, 0.4}});
  EXPECT_TRUE(greedy_decode(p).empty());
  DecodeConfig cfg;
  cfg.lm_weight = 0;
  EXPECT_EQ(beam_search(p, nullptr, cfg).best.labels, (Transcription{1}));
}

// |C| = 3 (a, b, c); the LM strongly prefers "ab" over "ac".
NGramModel ab_model() {
  std::vector<std::vector<std::string>> corpus(50, {"a", "b"});
  corpus.push_back({"a", "c"});
  corpus.push_back({"c"});
  return train_ngram(corpus, {"a", "b", "c"}, 2);
}

TEST(BeamSearch, LanguageModelFlipsANearTie) {
  const auto lm = ab_model();
  const auto alphabet = Alphabet::make_default(3);
  const LmScorer scorer(lm, alphabet);
  const auto p = rows({{0.02, 0.96, 0.01, 0.01}, {0.9, 0.04, 0.03, 0.03}, {0.02, 0.01, 0.48, 0.49}});
  EXPECT_EQ(greedy_decode(p), (Transcription{1, 3}));
  DecodeConfig cfg;
  cfg.lm_weight = 0;
  EXPECT_EQ(beam_search(p, &scorer, cfg).best.labels, (Transcription{1, 3}));
  cfg.lm_weight = 1;
  EXPECT_EQ(beam_search(p, &scorer, cfg).best.labels, (Transcription{1, 2}));
}

TEST(BeamSearch, HugeLmWeightPicksTheLmFavouriteAmongPossibleStrings) {
  const auto lm = ab_model();
  const auto alphabet = Alphabet::make_default(3);
  const LmScorer scorer(lm, alphabet);
  Rng rng(8);
  const auto p = random_posteriors(3, 4, rng);
  DecodeConfig cfg = exhaustive();
  cfg.lm_weight = 1e6;
  const auto got = brute_force_decode(p, &scorer, cfg);
  double best = -INFINITY;
  Transcription arg;
  for (const auto& [l, prob] : transcription_table(p)) {
    const double s = scorer.line_log_prob(l);
    if (s > best) best = s, arg = l;
  }
  EXPECT_EQ(got.labels, arg);
  EXPECT_EQ(arg, (Transcription{1, 2}));
  EXPECT_EQ(beam_search(p, &scorer, cfg).best.labels, arg);
}

TEST(BeamSearch, MatchesBruteForceWithLmAndBonus) {
  const auto lm = ab_model();
  const auto alphabet = Alphabet::make_default(3);
  const LmScorer scorer(lm, alphabet);
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_posteriors(4, 4, rng);
    DecodeConfig cfg = exhaustive();
    cfg.lm_weight = rng.uniform(0, 2);
    cfg.length_bonus = rng.uniform(-1, 1);
    const auto a = beam_search(p, &scorer, cfg).best;
    const auto b = brute_force_decode(p, &scorer, cfg);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_NEAR(a.combined, b.combined, 1e-9);
  }
}

TEST(BeamSearch, OutputStaysInsideTheCandidates) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_posteriors(10, 5, rng, 0.0);
    DecodeConfig cfg;
    cfg.threshold = 0.15;
    cfg.lm_weight = 0;
    const auto cands = frame_candidates(p, cfg.threshold);
    std::set<int> allowed;
    for (const auto& c : cands) allowed.insert(c.begin(), c.end());
    for (int s : beam_search(p, nullptr, cfg).best.labels) {
      EXPECT_NE(s, 0);
      EXPECT_TRUE(allowed.count(s));
    }
  }
}

TEST(BeamSearch, WiderBeamsNeverScoreWorse) {
  const auto lm = ab_model();
  const auto alphabet = Alphabet::make_default(3);
  const LmScorer scorer(lm, alphabet);
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_posteriors(8, 4, rng);
    DecodeConfig cfg;
    cfg.threshold = 0.05;
    double prev = -INFINITY;
    for (std::size_t n : {1u, 2u, 4u, 8u, 32u, 256u}) {
      cfg.beam_width = n;
      const double score = beam_search(p, &scorer, cfg).best.combined;
      EXPECT_GE(score, prev - 1e-12) << "trial " << trial << " N=" << n;
      prev = std::max(prev, score);
    }
  }
}

TEST(BruteForce, EmptyInputAndLimits) {
  const PosteriorSequence empty(Eigen::MatrixXd(0, 3));
  EXPECT_TRUE(brute_force_decode(empty, nullptr, exhaustive()).labels.empty());
  EXPECT_TRUE(beam_search(empty, nullptr, exhaustive()).best.labels.empty());
  Rng rng(1);
  EXPECT_THROW(brute_force_decode(random_posteriors(12, 4, rng), nullptr, exhaustive()), TooLargeError);
}

TEST(DecodeConfig, InvalidSettingsThrow) {
  Rng rng(1);
  const auto p = random_posteriors(3, 3, rng);
  DecodeConfig cfg;
  cfg.threshold = 1.0;
  EXPECT_THROW(beam_search(p, nullptr, cfg), ConfigError);
  cfg = {};
  cfg.beam_width = 0;
  EXPECT_THROW(beam_search(p, nullptr, cfg), ConfigError);
}

TEST(LmScorer, NaturalLogOfTheArpaScore) {
  const auto lm = ab_model();
  const LmScorer scorer(lm, Alphabet::make_default(3));
  const Transcription ab{1, 2};
  EXPECT_NEAR(scorer.line_log_prob(ab), lm_logprob(lm, ab, Alphabet::make_default(3)) * std::log(10.0), 1e-12);
}

}  // namespace
}  // namespace fcrn
