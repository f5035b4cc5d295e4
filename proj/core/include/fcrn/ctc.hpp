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

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fcrn/ink.hpp"
#include "fcrn/tensor.hpp"

namespace fcrn {

// A label sequence over C (no blanks).
using Transcription = Label;
// One label over C' per frame; 0 is the blank.
using Alignment = std::vector<int>;

// Merges adjacent repeats, then deletes blanks.
Transcription collapse(std::span<const int> alignment);

// Natural log of the total probability of all alignments collapsing to
// `label`; -infinity when no alignment of this length can produce it.
double ctc_log_prob(const PosteriorSequence& posteriors, std::span<const int> label);
double ctc_prob(const PosteriorSequence& posteriors, std::span<const int> label);

// Literal sum over all |C'|^T alignments. Throws TooLargeError beyond 1e7
// alignments.
double brute_force_prob(const PosteriorSequence& posteriors, std::span<const int> label);

struct CtcGradient {
  // -ln p(label); +infinity when the label is impossible.
  double loss = 0.0;
  bool feasible = true;
  // dLoss/dPosteriors, frames x labels. Zero when infeasible.
  Eigen::MatrixXd grad;
};

CtcGradient ctc_grad(const PosteriorSequence& posteriors, std::span<const int> label);

// Frame-wise argmax (lowest index wins ties) followed by collapse.
Transcription greedy_decode(const PosteriorSequence& posteriors);

// log(exp(a) + exp(b)) that tolerates -infinity operands.
double log_add(double a, double b);

}  // namespace fcrn
