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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fcrn/ink.hpp"

namespace fcrn {

enum class Smoothing { katz, addk };

struct SmoothingConfig {
  Smoothing kind = Smoothing::katz;
  // Additive constant for addk.
  double k = 1.0;
  // Good-Turing discounting applies to counts 1..gt_max under katz.
  int gt_max = 5;
};

// Character n-gram model in ARPA form: for every order, explicit entries
// n-gram -> (log10 probability, log10 backoff weight). Lookups back off
// through shorter contexts, multiplying by the backoff weights of the
// dropped histories.
class NGramModel {
 public:
  static constexpr std::string_view kBegin = "<s>";
  static constexpr std::string_view kEnd = "</s>";
  static constexpr std::string_view kUnknown = "<unk>";
  static constexpr int kBeginId = 0;
  static constexpr int kEndId = 1;
  static constexpr int kUnknownId = 2;

  struct Entry {
    double log10_prob = 0.0;
    double log10_backoff = 0.0;
  };
  using Table = std::map<std::vector<int>, Entry>;

  explicit NGramModel(int order);

  int order() const noexcept { return order_; }
  const std::vector<std::string>& words() const noexcept { return words_; }
  // Unknown names map to kUnknownId.
  int word_id(std::string_view name) const;
  int add_word(std::string_view name);

  const Table& table(int n) const { return tables_.at(n - 1); }
  Table& table(int n) { return tables_.at(n - 1); }

  // log10 P(word | context); only the last order-1 context words are used.
  double log10_prob(std::span<const int> context, int word) const;

  // Words that may follow a context: every vocabulary word except <s>.
  std::vector<int> follow_set() const;

 private:
  int order_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
  std::vector<Table> tables_;
};

// Trains over lines wrapped in <s> ... </s>. The vocabulary is the alphabet
// plus the three special tokens.
NGramModel train_ngram(const std::vector<Label>& corpus, const Alphabet& alphabet, int order,
                       const SmoothingConfig& smoothing = {});

// Same, over already-tokenized lines.
NGramModel train_ngram(const std::vector<std::vector<std::string>>& corpus,
                       const std::vector<std::string>& vocabulary, int order,
                       const SmoothingConfig& smoothing = {});

// Sum of log10 P(w_t | history) over the line and the closing </s>.
double lm_logprob(const NGramModel& model, std::span<const std::string> line);
double lm_logprob(const NGramModel& model, const Label& line, const Alphabet& alphabet);

void write_arpa(std::ostream& out, const NGramModel& model);
NGramModel read_arpa(std::istream& in);
void save_arpa(const std::filesystem::path& path, const NGramModel& model);
NGramModel load_arpa(const std::filesystem::path& path);

}  // namespace fcrn
