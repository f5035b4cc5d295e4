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

#ifndef FCRN_EVAL_HPP_
#define FCRN_EVAL_HPP_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fcrn/ctc.hpp"
#include "fcrn/ink.hpp"

namespace fcrn {

struct EditCounts {
  std::size_t N = 0;
  std::size_t De = 0;
  std::size_t Se = 0;
  std::size_t Ie = 0;

  EditCounts& operator+=(const EditCounts& o) {
    N += o.N;
    De += o.De;
    Se += o.Se;
    Ie += o.Ie;
    return *this;
  }
  bool operator==(const EditCounts&) const = default;
};

// Minimal Levenshtein alignment; among minimal alignments, the one with the
// most substitutions is chosen.
EditCounts edit_align(std::span<const int> ref, std::span<const int> hyp);

struct TranscriptionPair {
  Transcription ref;
  Transcription hyp;
};

struct Rates {
  double cr = 0.0;
  double ar = 0.0;
};

Rates rates(const EditCounts& total);
Rates cr_ar(std::span<const TranscriptionPair> pairs);

struct EvalReport {
  std::vector<EditCounts> lines;
  EditCounts total;
  Rates rates;
};

EvalReport evaluate(std::span<const TranscriptionPair> pairs);

// Flat text report: one line per pair, then aggregate CR/AR in percent.
void write_report(std::ostream& out, const EvalReport& report, const std::string& config_hash = {});

}  // namespace fcrn

#endif  // FCRN_EVAL_HPP_
