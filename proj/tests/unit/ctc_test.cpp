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
#include <string>

#include "fcrn/ctc.hpp"
#include "fcrn/error.hpp"
#include "test_support.hpp"

namespace fcrn {
namespace {

using testing::for_each_sequence;
using testing::numeric_gradient;
using testing::random_posteriors;
using testing::relative_error;
using testing::transcription_table;

// '_' is the blank; letters map through "aple" to 1..4.
Alignment spell(const std::string& s) {
  const std::string letters = "_aple";
  Alignment a;
  for (char c : s) a.push_back(static_cast<int>(letters.find(c)));
  return a;
}

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

TEST(Collapse, AppleFixtures) {
  // The l run is split by a blank, so both l's survive.
  EXPECT_EQ(collapse(spell("_aa_p_pl_ll_e")), spell("applle"));
  EXPECT_EQ(collapse(spell("_aa_p_pll_e")), spell("apple"));
  EXPECT_EQ(collapse(spell("_a_pp_p_l_ee_")), spell("apple"));
  EXPECT_TRUE(collapse(spell("____")).empty());
  EXPECT_TRUE(collapse(Alignment{}).empty());
}

// Re-collapsing is stable whenever the output has no adjacent repeats; an
// output like "aa" (from "a_a") legitimately collapses again to "a".
TEST(Collapse, IdempotentOnRepeatFreeOutput) {
  Rng rng(1);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    Alignment a(8);
    for (int& v : a) v = static_cast<int>(rng.below(4));
    const auto once = collapse(a);
    if (std::adjacent_find(once.begin(), once.end()) != once.end()) continue;
    EXPECT_EQ(collapse(once), once);
    ++checked;
  }
  EXPECT_GT(checked, 100);
  EXPECT_EQ(collapse(collapse(spell("a_a"))), spell("a"));
}

TEST(CtcProb, SingleFrame) {
  const auto p = rows({{0.3, 0.7}});
  EXPECT_NEAR(ctc_prob(p, Label{1}), 0.7, 1e-15);
}

TEST(CtcProb, TwoFramesThreeAlignments) {
  const auto p = rows({{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}});
  const double expected = 0.5 * 0.1 + 0.5 * 0.6 + 0.2 * 0.1;
  EXPECT_NEAR(ctc_prob(p, Label{1}), expected, 1e-15);
}

TEST(CtcProb, RepeatNeedsABlankBetween) {
  const auto p = rows({{0.2, 0.8}, {0.2, 0.8}});
  EXPECT_EQ(ctc_prob(p, Label{1, 1}), 0.0);
  EXPECT_EQ(brute_force_prob(p, Label{1, 1}), 0.0);
  EXPECT_EQ(ctc_log_prob(p, Label{1, 1}), -INFINITY);
  const auto q = rows({{0.2, 0.8}, {0.5, 0.5}, {0.2, 0.8}});
  EXPECT_NEAR(ctc_prob(q, Label{1, 1}), 0.8 * 0.5 * 0.8, 1e-15);
}

TEST(CtcProb, TooLongLabelIsZeroNotAnError) {
  const auto p = rows({{0.5, 0.25, 0.25}});
  EXPECT_EQ(ctc_prob(p, Label{1, 2}), 0.0);
}

TEST(CtcProb, InvalidLabelsThrow) {
  const auto p = rows({{0.5, 0.5}});
  EXPECT_THROW(ctc_prob(p, Label{0}), Error);
  EXPECT_THROW(ctc_prob(p, Label{2}), Error);
}

TEST(CtcProb, MatchesEnumerationOnEveryShortLabel) {
  Rng rng(5);
  const int T = 5, K = 4;
  const auto post = random_posteriors(T, K, rng);
  const auto table = transcription_table(post);
  for (int len = 0; len <= 3; ++len) {
    for_each_sequence(len, K - 1, [&](const std::vector<int>& raw) {
      Label l;
      for (int v : raw) l.push_back(v + 1);
      const auto it = table.find(l);
      const double expected = it == table.end() ? 0.0 : it->second;
      const double got = ctc_prob(post, l);
      if (expected == 0.0) {
        EXPECT_EQ(got, 0.0);
      } else {
        EXPECT_NEAR(got / expected, 1.0, 1e-10);
      }
      EXPECT_NEAR(brute_force_prob(post, l), expected, 1e-15);
    });
  }
}

TEST(CtcProb, SumsToOneOverAllTranscriptions) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const int T = 1 + static_cast<int>(rng.below(6));
    const auto post = random_posteriors(T, 3, rng);
    double total = 0;
    for (const auto& [label, p] : transcription_table(post)) total += ctc_prob(post, label);
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(CtcProb, NoNanForTinyPosteriors) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(200, 3, 1e-300);
  m.col(0).setConstant(1.0 - 2e-300);
  const PosteriorSequence p(m);
  const double lp = ctc_log_prob(p, Label{1, 2, 1});
  EXPECT_TRUE(std::isfinite(lp));
  const auto g = ctc_grad(p, Label{1, 2, 1});
  EXPECT_TRUE(g.grad.allFinite());
}

TEST(BruteForce, RefusesLargeInstances) {
  Rng rng(1);
  EXPECT_THROW(brute_force_prob(random_posteriors(12, 5, rng), Label{1}), TooLargeError);
}

TEST(CtcGrad, MatchesFiniteDifferences) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int T = 2 + static_cast<int>(rng.below(5));
    const int K = 2 + static_cast<int>(rng.below(3));
    const auto post = random_posteriors(T, K, rng, 0.05);
    Label l;
    const int len = 1 + static_cast<int>(rng.below(std::min(T, 3)));
    for (int i = 0; i < len; ++i) l.push_back(1 + static_cast<int>(rng.below(K - 1)));
    const auto g = ctc_grad(post, l);
    if (!g.feasible) continue;
    const Eigen::MatrixXd& m = post.matrix();
    std::vector<double> x(m.data(), m.data() + m.size());
    auto f = [&](std::span<const double> v) {
      const Eigen::MatrixXd mm = Eigen::Map<const Eigen::MatrixXd>(v.data(), T, K);
      return -ctc_log_prob(PosteriorSequence(mm), l);
    };
    const auto numeric = numeric_gradient(f, x, 1e-7);
    const Eigen::VectorXd analytic = Eigen::Map<const Eigen::VectorXd>(g.grad.data(), g.grad.size());
    EXPECT_LT(relative_error(analytic, numeric, 1e-3), 1e-6);
    EXPECT_NEAR(g.loss, -ctc_log_prob(post, l), 1e-12);
  }
}

TEST(CtcGrad, AbsentSymbolsHaveZeroGradientAtOneFrame) {
  const auto p = rows({{0.2, 0.5, 0.3}});
  const auto g = ctc_grad(p, Label{1});
  EXPECT_EQ(g.grad(0, 0), 0.0);
  EXPECT_EQ(g.grad(0, 2), 0.0);
  EXPECT_NEAR(g.grad(0, 1), -1.0 / 0.5, 1e-12);
}

TEST(CtcGrad, InfeasibleLabelIsFlagged) {
  const auto p = rows({{0.5, 0.5}});
  const auto g = ctc_grad(p, Label{1, 1});
  EXPECT_FALSE(g.feasible);
  EXPECT_EQ(g.loss, INFINITY);
  EXPECT_EQ(g.grad.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Greedy, OneHotSpelling) {
  const auto p = rows({{1, 0, 0}, {0, 1, 0}, {1, 0, 0}, {0, 0, 1}});
  EXPECT_EQ(greedy_decode(p), (Transcription{1, 2}));
}

TEST(Greedy, UniformRowsDecodeToNothing) {
  const auto p = rows({{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}});
  EXPECT_TRUE(greedy_decode(p).empty());
}

TEST(Greedy, IsSuboptimalOnTheSixFourInstance) {
  const auto p = rows({{0.6, 0.4}, {0.6, 0.4}});
  EXPECT_TRUE(greedy_decode(p).empty());
  EXPECT_NEAR(ctc_prob(p, Label{1}), 0.64, 1e-15);
  EXPECT_NEAR(ctc_prob(p, Label{}), 0.36, 1e-15);
}

TEST(LogAdd, HandlesInfinities) {
  EXPECT_EQ(log_add(-INFINITY, -INFINITY), -INFINITY);
  EXPECT_EQ(log_add(-INFINITY, 2.0), 2.0);
  EXPECT_NEAR(log_add(std::log(0.25), std::log(0.5)), std::log(0.75), 1e-15);
}

}  // namespace
}  // namespace fcrn
