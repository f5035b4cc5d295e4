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

#include "fcrn/ctc.hpp"

#include <cmath>
#include <limits>

#include "fcrn/error.hpp"

namespace fcrn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kBruteForceLimit = 1e7;

void check_label(const PosteriorSequence& post, std::span<const int> label) {
  for (int s : label) {
    if (s <= 0 || s >= post.labels()) {
      throw AlphabetError("label symbol " + std::to_string(s) + " outside 1.." + std::to_string(post.labels() - 1));
    }
  }
}

// Blank-interleaved label: _ l1 _ l2 ... lL _.
std::vector<int> extend(std::span<const int> label) {
  std::vector<int> ext(2 * label.size() + 1, 0);
  for (std::size_t i = 0; i < label.size(); ++i) ext[2 * i + 1] = label[i];
  return ext;
}

bool can_skip(const std::vector<int>& ext, std::size_t s) {
  return s >= 2 && ext[s] != 0 && ext[s] != ext[s - 2];
}

struct Lattice {
  // entry[t][s]: log prob of reaching state s at frame t before emitting
  // frame t. forward[t][s] = entry[t][s] + log y_t(ext[s]).
  Eigen::MatrixXd entry;
  Eigen::MatrixXd forward;
  // backward[t][s]: log prob of completing the label from state s after
  // frame t (frame t excluded).
  Eigen::MatrixXd backward;
  double log_prob = kNegInf;
};

Lattice run_lattice(const PosteriorSequence& post, const std::vector<int>& ext, bool with_backward) {
  const int T = post.frames();
  const auto S = static_cast<Eigen::Index>(ext.size());
  Lattice lat;
  if (T == 0) {
    lat.log_prob = ext.size() == 1 ? 0.0 : kNegInf;
    return lat;
  }
  const Eigen::MatrixXd log_y = post.matrix().array().log();
  lat.entry = Eigen::MatrixXd::Constant(T, S, kNegInf);
  lat.forward = Eigen::MatrixXd::Constant(T, S, kNegInf);
  lat.entry(0, 0) = 0.0;
  if (S > 1) lat.entry(0, 1) = 0.0;
  for (Eigen::Index s = 0; s < std::min<Eigen::Index>(S, 2); ++s) lat.forward(0, s) = log_y(0, ext[s]);
  for (int t = 1; t < T; ++t) {
    for (Eigen::Index s = 0; s < S; ++s) {
      double e = lat.forward(t - 1, s);
      if (s >= 1) e = log_add(e, lat.forward(t - 1, s - 1));
      if (can_skip(ext, static_cast<std::size_t>(s))) e = log_add(e, lat.forward(t - 1, s - 2));
      lat.entry(t, s) = e;
      lat.forward(t, s) = e + log_y(t, ext[s]);
    }
  }
  lat.log_prob = lat.forward(T - 1, S - 1);
  if (S > 1) lat.log_prob = log_add(lat.log_prob, lat.forward(T - 1, S - 2));

  if (with_backward) {
    lat.backward = Eigen::MatrixXd::Constant(T, S, kNegInf);
    lat.backward(T - 1, S - 1) = 0.0;
    if (S > 1) lat.backward(T - 1, S - 2) = 0.0;
    for (int t = T - 2; t >= 0; --t) {
      for (Eigen::Index s = 0; s < S; ++s) {
        double b = lat.backward(t + 1, s) + log_y(t + 1, ext[s]);
        if (s + 1 < S) b = log_add(b, lat.backward(t + 1, s + 1) + log_y(t + 1, ext[s + 1]));
        if (s + 2 < S && can_skip(ext, static_cast<std::size_t>(s + 2))) {
          b = log_add(b, lat.backward(t + 1, s + 2) + log_y(t + 1, ext[s + 2]));
        }
        lat.backward(t, s) = b;
      }
    }
  }
  return lat;
}

}  // namespace

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

Transcription collapse(std::span<const int> alignment) {
  Transcription out;
  int prev = -1;
  for (int a : alignment) {
    if (a != prev && a != 0) out.push_back(a);
    prev = a;
  }
  return out;
}

double ctc_log_prob(const PosteriorSequence& posteriors, std::span<const int> label) {
  check_label(posteriors, label);
  return run_lattice(posteriors, extend(label), false).log_prob;
}

double ctc_prob(const PosteriorSequence& posteriors, std::span<const int> label) {
  return std::exp(ctc_log_prob(posteriors, label));
}

double brute_force_prob(const PosteriorSequence& posteriors, std::span<const int> label) {
  check_label(posteriors, label);
  const int T = posteriors.frames();
  const int K = posteriors.labels();
  if (std::pow(static_cast<double>(K), T) > kBruteForceLimit) {
    throw TooLargeError("brute force over " + std::to_string(K) + "^" + std::to_string(T) + " alignments refused");
  }
  const Transcription target(label.begin(), label.end());
  Alignment a(T, 0);
  double total = 0.0;
  while (true) {
    if (collapse(a) == target) {
      double p = 1.0;
      for (int t = 0; t < T; ++t) p *= posteriors(t, a[t]);
      total += p;
    }
    int t = T - 1;
    while (t >= 0 && a[t] == K - 1) a[t--] = 0;
    if (t < 0) break;
    ++a[t];
  }
  return total;
}

CtcGradient ctc_grad(const PosteriorSequence& posteriors, std::span<const int> label) {
  check_label(posteriors, label);
  const auto ext = extend(label);
  const Lattice lat = run_lattice(posteriors, ext, true);
  CtcGradient out;
  out.grad = Eigen::MatrixXd::Zero(posteriors.frames(), posteriors.labels());
  if (lat.log_prob == kNegInf) {
    out.loss = std::numeric_limits<double>::infinity();
    out.feasible = false;
    return out;
  }
  out.loss = -lat.log_prob;
  const int T = posteriors.frames();
  const int K = posteriors.labels();
  std::vector<double> acc(K);
  for (int t = 0; t < T; ++t) {
    std::fill(acc.begin(), acc.end(), kNegInf);
    for (std::size_t s = 0; s < ext.size(); ++s) {
      const auto si = static_cast<Eigen::Index>(s);
      acc[ext[s]] = log_add(acc[ext[s]], lat.entry(t, si) + lat.backward(t, si));
    }
    // d(-ln p)/dy = -(dp/dy) / p.
    for (int k = 0; k < K; ++k) {
      if (acc[k] != kNegInf) out.grad(t, k) = -std::exp(acc[k] - lat.log_prob);
    }
  }
  return out;
}

Transcription greedy_decode(const PosteriorSequence& posteriors) {
  Alignment best(posteriors.frames(), 0);
  for (int t = 0; t < posteriors.frames(); ++t) {
    int arg = 0;
    for (int k = 1; k < posteriors.labels(); ++k) {
      if (posteriors(t, k) > posteriors(t, arg)) arg = k;
    }
    best[t] = arg;
  }
  return collapse(best);
}

}  // namespace fcrn
