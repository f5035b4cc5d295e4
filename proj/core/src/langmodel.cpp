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

#include "fcrn/langmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fcrn/error.hpp"

namespace fcrn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Below this the discounted leftover of a context is treated as exhausted.
constexpr double kMinLeftover = 1e-6;

double log10_or_neg_inf(double p) { return p > 0.0 ? std::log10(p) : kNegInf; }

using Counts = std::map<std::vector<int>, double>;

// Katz coefficients d_r for r = 1..gt_max from the count-of-counts of one
// order; invalid coefficients fall back to 1 (no discount).
std::vector<double> good_turing_discounts(const Counts& counts, int gt_max) {
  std::vector<double> d(gt_max + 2, 1.0);
  if (gt_max < 1) return d;
  std::vector<double> n(gt_max + 2, 0.0);
  for (const auto& [_, c] : counts) {
    const auto r = static_cast<long>(c);
    if (r >= 1 && r <= gt_max + 1 && static_cast<double>(r) == c) n[r] += 1.0;
  }
  if (n[1] <= 0.0) return d;
  const double common = (gt_max + 1) * n[gt_max + 1] / n[1];
  if (common >= 1.0) return d;
  for (int r = 1; r <= gt_max; ++r) {
    if (n[r] <= 0.0) continue;
    const double ratio = (r + 1) * n[r + 1] / (r * n[r]);
    const double coeff = (ratio - common) / (1.0 - common);
    if (coeff > 0.0 && coeff <= 1.0) d[r] = coeff;
  }
  return d;
}

double discount(const std::vector<double>& d, double count) {
  const auto r = static_cast<long>(count);
  if (static_cast<double>(r) == count && r >= 1 && r < static_cast<long>(d.size()) - 1) return d[r];
  return 1.0;
}

}  // namespace

NGramModel::NGramModel(int order) : order_(order) {
  if (order < 1 || order > 3) throw ConfigError("n-gram order must be 1, 2 or 3");
  tables_.resize(order);
  add_word(kBegin);
  add_word(kEnd);
  add_word(kUnknown);
}

int NGramModel::word_id(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  return it == ids_.end() ? kUnknownId : it->second;
}

int NGramModel::add_word(std::string_view name) {
  auto [it, inserted] = ids_.emplace(std::string(name), static_cast<int>(words_.size()));
  if (inserted) words_.emplace_back(name);
  return it->second;
}

std::vector<int> NGramModel::follow_set() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(words_.size()); ++i) {
    if (i != kBeginId) out.push_back(i);
  }
  return out;
}

double NGramModel::log10_prob(std::span<const int> context, int word) const {
  const int n_max = std::min<int>(order_, static_cast<int>(context.size()) + 1);
  std::vector<int> key;
  double backoff = 0.0;
  for (int n = n_max; n >= 1; --n) {
    key.assign(context.end() - (n - 1), context.end());
    key.push_back(word);
    const auto& t = tables_[n - 1];
    if (auto it = t.find(key); it != t.end()) return backoff + it->second.log10_prob;
    if (n >= 2) {
      key.pop_back();
      const auto& lower = tables_[n - 2];
      if (auto h = lower.find(key); h != lower.end()) backoff += h->second.log10_backoff;
    }
  }
  return kNegInf;
}

NGramModel train_ngram(const std::vector<std::vector<std::string>>& corpus,
                       const std::vector<std::string>& vocabulary, int order,
                       const SmoothingConfig& smoothing) {
  if (corpus.empty()) throw ConfigError("cannot train a language model on an empty corpus");
  if (smoothing.kind == Smoothing::addk && !(smoothing.k >= 0.0)) throw ConfigError("add-k constant must be >= 0");
  NGramModel model(order);
  for (const auto& w : vocabulary) model.add_word(w);

  std::vector<Counts> counts(order);
  for (const auto& line : corpus) {
    std::vector<int> ids{NGramModel::kBeginId};
    for (const auto& w : line) ids.push_back(model.word_id(w));
    ids.push_back(NGramModel::kEndId);
    for (int n = 1; n <= order; ++n) {
      for (std::size_t end = std::max<std::size_t>(1, n - 1); end < ids.size(); ++end) {
        counts[n - 1][std::vector<int>(ids.begin() + (end + 1 - n), ids.begin() + end + 1)] += 1.0;
      }
    }
  }

  const auto follow = model.follow_set();
  const double v = static_cast<double>(follow.size());

  // Unigrams.
  {
    auto& table = model.table(1);
    const auto& c1 = counts[0];
    auto count_of = [&](int w) {
      auto it = c1.find({w});
      return it == c1.end() ? 0.0 : it->second;
    };
    double total = 0.0;
    int zero = 0;
    for (int w : follow) {
      total += count_of(w);
      if (count_of(w) == 0.0) ++zero;
    }
    table[{NGramModel::kBeginId}] = {kNegInf, 0.0};
    if (smoothing.kind == Smoothing::addk) {
      for (int w : follow) {
        table[{w}] = {log10_or_neg_inf((count_of(w) + smoothing.k) / (total + smoothing.k * v)), 0.0};
      }
    } else {
      const auto d = good_turing_discounts(c1, smoothing.gt_max);
      double seen_mass = 0.0;
      for (int w : follow) seen_mass += discount(d, count_of(w)) * count_of(w) / total;
      const double leftover = 1.0 - seen_mass;
      for (int w : follow) {
        const double c = count_of(w);
        double p;
        if (zero == 0) {
          p = c / total;
        } else if (leftover < kMinLeftover) {
          // Exhausted: one pseudo-count per unseen word.
          p = c > 0.0 ? c / (total + zero) : 1.0 / (total + zero);
        } else {
          p = c > 0.0 ? discount(d, c) * c / total : leftover / zero;
        }
        table[{w}] = {log10_or_neg_inf(p), 0.0};
      }
    }
  }

  for (int n = 2; n <= order; ++n) {
    const auto& cn = counts[n - 1];
    // history -> (total count, continuations)
    std::map<std::vector<int>, std::pair<double, std::vector<std::pair<int, double>>>> histories;
    for (const auto& [gram, c] : cn) {
      auto& h = histories[std::vector<int>(gram.begin(), gram.end() - 1)];
      h.first += c;
      h.second.emplace_back(gram.back(), c);
    }
    const auto d = good_turing_discounts(cn, smoothing.gt_max);
    auto& table = model.table(n);
    auto& lower = model.table(n - 1);
    for (const auto& [hist, info] : histories) {
      const auto& [total, seen] = info;
      auto& hist_entry = lower[hist];
      if (smoothing.kind == Smoothing::addk) {
        for (int w : follow) {
          auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == w; });
          const double c = it == seen.end() ? 0.0 : it->second;
          auto key = hist;
          key.push_back(w);
          table[key] = {log10_or_neg_inf((c + smoothing.k) / (total + smoothing.k * v)), 0.0};
        }
        hist_entry.log10_backoff = 0.0;
        continue;
      }

      const bool all_seen = seen.size() >= follow.size();
      std::vector<double> probs;
      double seen_sum = 0.0;
      for (const auto& [w, c] : seen) {
        const double p = all_seen ? c / total : discount(d, c) * c / total;
        probs.push_back(p);
        seen_sum += p;
      }
      if (!all_seen && 1.0 - seen_sum < kMinLeftover) {
        const double types = static_cast<double>(seen.size());
        seen_sum = 0.0;
        for (std::size_t i = 0; i < seen.size(); ++i) {
          probs[i] = seen[i].second / (total + types);
          seen_sum += probs[i];
        }
      }
      const std::vector<int> shorter(hist.begin() + 1, hist.end());
      double lower_sum = 0.0;
      for (const auto& [w, c] : seen) lower_sum += std::pow(10.0, model.log10_prob(shorter, w));
      for (std::size_t i = 0; i < seen.size(); ++i) {
        auto key = hist;
        key.push_back(seen[i].first);
        table[key] = {log10_or_neg_inf(probs[i]), 0.0};
      }
      if (all_seen || 1.0 - lower_sum <= 0.0) {
        hist_entry.log10_backoff = 0.0;
      } else {
        hist_entry.log10_backoff = log10_or_neg_inf((1.0 - seen_sum) / (1.0 - lower_sum));
      }
    }
  }
  return model;
}

NGramModel train_ngram(const std::vector<Label>& corpus, const Alphabet& alphabet, int order,
                       const SmoothingConfig& smoothing) {
  std::vector<std::string> vocabulary;
  for (int i = 1; i <= alphabet.num_symbols(); ++i) vocabulary.push_back(alphabet.name(i));
  std::vector<std::vector<std::string>> lines;
  lines.reserve(corpus.size());
  for (const auto& label : corpus) {
    std::vector<std::string> words;
    for (int s : label) words.push_back(alphabet.name(s));
    lines.push_back(std::move(words));
  }
  return train_ngram(lines, vocabulary, order, smoothing);
}

double lm_logprob(const NGramModel& model, std::span<const std::string> line) {
  std::vector<int> ids{NGramModel::kBeginId};
  for (const auto& w : line) ids.push_back(model.word_id(w));
  ids.push_back(NGramModel::kEndId);
  double total = 0.0;
  const int history = model.order() - 1;
  for (std::size_t t = 1; t < ids.size(); ++t) {
    const std::size_t begin = t > static_cast<std::size_t>(history) ? t - history : 0;
    total += model.log10_prob(std::span<const int>(ids.data() + begin, t - begin), ids[t]);
  }
  return total;
}

double lm_logprob(const NGramModel& model, const Label& line, const Alphabet& alphabet) {
  std::vector<std::string> words;
  for (int s : line) words.push_back(alphabet.name(s));
  return lm_logprob(model, words);
}

}  // namespace fcrn
