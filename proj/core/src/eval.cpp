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

#include "fcrn/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "fcrn/error.hpp"

namespace fcrn {

namespace {

struct Cell {
  std::size_t cost = 0;
  std::size_t subs = 0;
  EditCounts counts;
};

bool preferred(const Cell& a, const Cell& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.subs > b.subs;
}

}  // namespace

EditCounts edit_align(std::span<const int> ref, std::span<const int> hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    prev[j].cost = j;
    prev[j].counts.Ie = j;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = prev[0];
    cur[0].cost += 1;
    cur[0].counts.De += 1;
    cur[0].counts.N += 1;
    for (std::size_t j = 1; j <= m; ++j) {
      Cell diag = prev[j - 1];
      diag.counts.N += 1;
      if (ref[i - 1] != hyp[j - 1]) {
        diag.cost += 1;
        diag.subs += 1;
        diag.counts.Se += 1;
      }
      Cell del = prev[j];
      del.cost += 1;
      del.counts.De += 1;
      del.counts.N += 1;
      Cell ins = cur[j - 1];
      ins.cost += 1;
      ins.counts.Ie += 1;
      Cell best = diag;
      if (preferred(del, best)) best = del;
      if (preferred(ins, best)) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[m].counts;
}

Rates rates(const EditCounts& total) {
  if (total.N == 0) throw Error("CR/AR undefined: reference set has no symbols");
  const double n = static_cast<double>(total.N);
  const double correct = n - static_cast<double>(total.De + total.Se);
  return {correct / n, (correct - static_cast<double>(total.Ie)) / n};
}

EvalReport evaluate(std::span<const TranscriptionPair> pairs) {
  EvalReport report;
  report.lines.reserve(pairs.size());
  for (const auto& p : pairs) {
    report.lines.push_back(edit_align(p.ref, p.hyp));
    report.total += report.lines.back();
  }
  report.rates = rates(report.total);
  return report;
}

Rates cr_ar(std::span<const TranscriptionPair> pairs) { return evaluate(pairs).rates; }

void write_report(std::ostream& out, const EvalReport& report, const std::string& config_hash) {
  if (!config_hash.empty()) out << "config " << config_hash << '\n';
  for (std::size_t i = 0; i < report.lines.size(); ++i) {
    const auto& c = report.lines[i];
    out << "line " << i << " N=" << c.N << " De=" << c.De << " Se=" << c.Se << " Ie=" << c.Ie << '\n';
  }
  const auto& t = report.total;
  out << "total N=" << t.N << " De=" << t.De << " Se=" << t.Se << " Ie=" << t.Ie << '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "CR %.2f\nAR %.2f\n", 100.0 * report.rates.cr, 100.0 * report.rates.ar);
  out << buf;
}

}  // namespace fcrn
