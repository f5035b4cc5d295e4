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

#include "fcrn/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "fcrn/error.hpp"

namespace fcrn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kBruteForceLimit = 1e6;

void check_config(const DecodeConfig& config) {
  if (!(config.threshold >= 0.0 && config.threshold < 1.0)) throw ConfigError("threshold must be in [0, 1)");
  if (config.beam_width < 1) throw ConfigError("beam width must be at least 1");
  if (!(config.lm_weight >= 0.0)) throw ConfigError("LM weight must be non-negative");
}

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.combined != b.combined) return a.combined > b.combined;
  return a.labels < b.labels;
}

double combine(const Hypothesis& h, const DecodeConfig& config) {
  return h.acoustic + config.lm_weight * h.lm + config.length_bonus * static_cast<double>(h.labels.size());
}

RegionPaths prefix_beam(const Region& region, std::span<const CandidateSet> candidates,
                        const PosteriorSequence& post, std::size_t width) {
  struct Score {
    double blank = kNegInf;
    double label = kNegInf;
    double total() const { return log_add(blank, label); }
  };
  std::map<Transcription, Score> beam;
  beam[{}].blank = 0.0;
  for (int t = region.begin; t < region.end; ++t) {
    std::map<Transcription, Score> next;
    for (const auto& [prefix, score] : beam) {
      for (int c : candidates[t]) {
        const double ly = std::log(post(t, c));
        if (c == 0) {
          auto& s = next[prefix];
          s.blank = log_add(s.blank, score.total() + ly);
          continue;
        }
        auto extended = prefix;
        extended.push_back(c);
        if (!prefix.empty() && prefix.back() == c) {
          auto& same = next[prefix];
          same.label = log_add(same.label, score.label + ly);
          auto& ext = next[extended];
          ext.label = log_add(ext.label, score.blank + ly);
        } else {
          auto& ext = next[extended];
          ext.label = log_add(ext.label, score.total() + ly);
        }
      }
    }
    std::vector<std::pair<Transcription, Score>> ranked(next.begin(), next.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second.total() > b.second.total(); });
    if (ranked.size() > width) ranked.resize(width);
    beam = std::map<Transcription, Score>(ranked.begin(), ranked.end());
  }
  RegionPaths out;
  out.fallback = true;
  for (const auto& [labels, score] : beam) out.paths.push_back({labels, score.total()});
  return out;
}

}  // namespace

LmScorer::LmScorer(const NGramModel& model, const Alphabet& alphabet) : model_(&model) {
  word_ids_.assign(alphabet.num_labels(), NGramModel::kUnknownId);
  for (int i = 1; i <= alphabet.num_symbols(); ++i) word_ids_[i] = model.word_id(alphabet.name(i));
}

double LmScorer::lookup(std::span<const int> history, int word) const {
  const std::size_t keep = static_cast<std::size_t>(model_->order() - 1);
  std::vector<int> context;
  if (history.size() < keep) context.push_back(NGramModel::kBeginId);
  const std::size_t from = history.size() > keep ? history.size() - keep : 0;
  for (std::size_t i = from; i < history.size(); ++i) context.push_back(word_ids_.at(history[i]));
  return model_->log10_prob(context, word) * std::numbers::ln10;
}

double LmScorer::log_prob(std::span<const int> history, int symbol) const {
  return lookup(history, word_ids_.at(symbol));
}

double LmScorer::end_log_prob(std::span<const int> history) const {
  return lookup(history, NGramModel::kEndId);
}

double LmScorer::line_log_prob(std::span<const int> line) const {
  double total = 0.0;
  for (std::size_t i = 0; i < line.size(); ++i) total += log_prob(line.first(i), line[i]);
  return total + end_log_prob(line);
}

std::vector<CandidateSet> frame_candidates(const PosteriorSequence& posteriors, double threshold) {
  std::vector<CandidateSet> out(posteriors.frames());
  for (int t = 0; t < posteriors.frames(); ++t) {
    int arg = 0;
    for (int c = 0; c < posteriors.labels(); ++c) {
      if (posteriors(t, c) > threshold) out[t].push_back(c);
      if (posteriors(t, c) > posteriors(t, arg)) arg = c;
    }
    if (out[t].empty()) out[t].push_back(arg);
  }
  return out;
}

std::vector<Region> split_regions(std::span<const CandidateSet> candidates) {
  std::vector<Region> regions;
  const int T = static_cast<int>(candidates.size());
  int start = -1;
  for (int t = 0; t <= T; ++t) {
    const bool separator = t == T || (candidates[t].size() == 1 && candidates[t][0] == 0);
    if (separator) {
      if (start >= 0) regions.push_back({start, t});
      start = -1;
    } else if (start < 0) {
      start = t;
    }
  }
  return regions;
}

RegionPaths region_paths(const Region& region, std::span<const CandidateSet> candidates,
                         const PosteriorSequence& posteriors, const DecodeConfig& config) {
  if (region.begin < 0 || region.end > static_cast<int>(candidates.size()) || region.begin > region.end) {
    throw ConfigError("region outside the candidate frames");
  }
  double count = 1.0;
  for (int t = region.begin; t < region.end; ++t) count *= static_cast<double>(candidates[t].size());
  if (count > static_cast<double>(config.enumeration_cap)) {
    return prefix_beam(region, candidates, posteriors, config.beam_width);
  }

  const int len = region.end - region.begin;
  std::vector<std::size_t> digit(len, 0);
  std::vector<int> alignment(len);
  std::map<Transcription, double> pooled;
  while (true) {
    double lp = 0.0;
    for (int i = 0; i < len; ++i) {
      alignment[i] = candidates[region.begin + i][digit[i]];
      lp += std::log(posteriors(region.begin + i, alignment[i]));
    }
    auto [it, inserted] = pooled.try_emplace(collapse(alignment), lp);
    if (!inserted) it->second = log_add(it->second, lp);
    int i = len - 1;
    while (i >= 0 && digit[i] + 1 == candidates[region.begin + i].size()) digit[i--] = 0;
    if (i < 0) break;
    ++digit[i];
  }
  RegionPaths out;
  for (auto& [labels, lp] : pooled) out.paths.push_back({labels, lp});
  return out;
}

DecodeResult beam_search(const PosteriorSequence& posteriors, const LmScorer* lm, const DecodeConfig& config) {
  check_config(config);
  const bool use_lm = lm != nullptr && config.lm_weight > 0.0;
  const auto candidates = frame_candidates(posteriors, config.threshold);
  const auto regions = split_regions(candidates);

  DecodeResult result;
  result.regions = regions.size();
  double separators = 0.0;
  std::vector<char> in_region(posteriors.frames(), 0);
  for (const auto& r : regions) std::fill(in_region.begin() + r.begin, in_region.begin() + r.end, 1);
  for (int t = 0; t < posteriors.frames(); ++t) {
    if (!in_region[t]) separators += std::log(posteriors(t, 0));
  }

  std::vector<Hypothesis> beam{Hypothesis{}};
  for (const auto& region : regions) {
    const auto partials = region_paths(region, candidates, posteriors, config);
    if (partials.fallback) ++result.fallback_regions;
    std::map<Transcription, Hypothesis> merged;
    for (const auto& h : beam) {
      for (const auto& p : partials.paths) {
        Transcription labels = h.labels;
        double lm_score = h.lm;
        for (int s : p.labels) {
          if (use_lm) lm_score += lm->log_prob(labels, s);
          labels.push_back(s);
        }
        const double acoustic = h.acoustic + p.log_prob;
        auto [it, inserted] = merged.try_emplace(labels, Hypothesis{labels, acoustic, lm_score, 0.0});
        if (!inserted) it->second.acoustic = log_add(it->second.acoustic, acoustic);
      }
    }
    beam.clear();
    for (auto& [_, h] : merged) {
      h.combined = combine(h, config);
      beam.push_back(std::move(h));
    }
    std::sort(beam.begin(), beam.end(), better);
    if (beam.size() > config.beam_width) beam.resize(config.beam_width);
  }

  for (auto& h : beam) {
    h.acoustic += separators;
    if (use_lm) h.lm += lm->end_log_prob(h.labels);
    h.combined = combine(h, config);
  }
  std::sort(beam.begin(), beam.end(), better);
  result.best = beam.front();
  return result;
}

Hypothesis brute_force_decode(const PosteriorSequence& posteriors, const LmScorer* lm, const DecodeConfig& config) {
  check_config(config);
  const int T = posteriors.frames();
  const int K = posteriors.labels();
  if (std::pow(static_cast<double>(K), T) > kBruteForceLimit) {
    throw TooLargeError("exhaustive decode over " + std::to_string(K) + "^" + std::to_string(T) + " alignments refused");
  }
  const bool use_lm = lm != nullptr && config.lm_weight > 0.0;
  std::map<Transcription, double> pooled;
  Alignment a(T, 0);
  while (true) {
    double lp = 0.0;
    for (int t = 0; t < T; ++t) lp += std::log(posteriors(t, a[t]));
    auto [it, inserted] = pooled.try_emplace(collapse(a), lp);
    if (!inserted) it->second = log_add(it->second, lp);
    int t = T - 1;
    while (t >= 0 && a[t] == K - 1) a[t--] = 0;
    if (t < 0) break;
    ++a[t];
  }
  Hypothesis best;
  bool first = true;
  for (const auto& [labels, lp] : pooled) {
    Hypothesis h{labels, lp, use_lm ? lm->line_log_prob(labels) : 0.0, 0.0};
    h.combined = combine(h, config);
    if (first || better(h, best)) best = h;
    first = false;
  }
  return best;
}

}  // namespace fcrn
