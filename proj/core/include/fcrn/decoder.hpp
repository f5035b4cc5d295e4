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

#include <cstddef>
#include <span>
#include <vector>

#include "fcrn/ctc.hpp"
#include "fcrn/ink.hpp"
#include "fcrn/langmodel.hpp"
#include "fcrn/tensor.hpp"

namespace fcrn {

struct DecodeConfig {
  double threshold = 0.001;
  std::size_t beam_width = 32;
  double lm_weight = 1.0;
  double length_bonus = 0.0;
  // Largest alignment count enumerated exactly inside one region.
  std::size_t enumeration_cap = 100000;
};

// Natural-log character LM scores over alphabet indices.
class LmScorer {
 public:
  LmScorer(const NGramModel& model, const Alphabet& alphabet);

  int order() const noexcept { return model_->order(); }
  // ln P(symbol | history); only the last order-1 history symbols matter.
  double log_prob(std::span<const int> history, int symbol) const;
  double end_log_prob(std::span<const int> history) const;
  // ln P of the whole line including the closing boundary.
  double line_log_prob(std::span<const int> line) const;

 private:
  double lookup(std::span<const int> history, int word) const;

  const NGramModel* model_;
  std::vector<int> word_ids_;  // alphabet index -> LM word id
};

// Labels with posterior above the threshold; the argmax alone when none is.
using CandidateSet = std::vector<int>;
std::vector<CandidateSet> frame_candidates(const PosteriorSequence& posteriors, double threshold);

// Frames [begin, end) between frames whose only candidate is the blank.
struct Region {
  int begin = 0;
  int end = 0;
  friend bool operator==(const Region&, const Region&) = default;
};
std::vector<Region> split_regions(std::span<const CandidateSet> candidates);

struct PartialPath {
  Transcription labels;
  double log_prob = 0.0;  // ln of the summed probability of its alignments
};

struct RegionPaths {
  std::vector<PartialPath> paths;  // sorted by labels
  // Set when the alignment count exceeded the cap and a width-N prefix beam
  // was used instead of exact enumeration.
  bool fallback = false;
};

RegionPaths region_paths(const Region& region, std::span<const CandidateSet> candidates,
                         const PosteriorSequence& posteriors, const DecodeConfig& config);

struct Hypothesis {
  Transcription labels;
  double acoustic = 0.0;  // ln p, summed over merged alignments
  double lm = 0.0;        // ln P_lm, including the end boundary once final
  double combined = 0.0;  // acoustic + lm_weight * lm + length_bonus * |labels|
};

struct DecodeResult {
  Hypothesis best;
  std::size_t regions = 0;
  std::size_t fallback_regions = 0;
};

// Region-by-region concatenation keeping the top beam_width hypotheses by
// combined score; `lm` may be null.
DecodeResult beam_search(const PosteriorSequence& posteriors, const LmScorer* lm, const DecodeConfig& config);

// Exact argmax of the combined score over every transcription, by
// enumerating all |C'|^T alignments. Throws TooLargeError beyond 1e6.
Hypothesis brute_force_decode(const PosteriorSequence& posteriors, const LmScorer* lm, const DecodeConfig& config);

}  // namespace fcrn
