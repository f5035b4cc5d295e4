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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fcrn/error.hpp"
#include "fcrn/langmodel.hpp"

namespace fcrn {

namespace {

// ARPA convention for log10(0).
constexpr double kArpaZero = -99.0;

std::string format_log(double v) {
  if (!std::isfinite(v) || v <= kArpaZero) return "-99";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

double parse_log(const std::string& token, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError("bad log probability '" + token + "'", line_no);
  }
  return v <= kArpaZero ? -std::numeric_limits<double>::infinity() : v;
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

}  // namespace

void write_arpa(std::ostream& out, const NGramModel& model) {
  out << "\\data\\\n";
  for (int n = 1; n <= model.order(); ++n) out << "ngram " << n << '=' << model.table(n).size() << '\n';
  for (int n = 1; n <= model.order(); ++n) {
    out << "\n\\" << n << "-grams:\n";
    for (const auto& [gram, entry] : model.table(n)) {
      out << format_log(entry.log10_prob) << '\t';
      for (std::size_t i = 0; i < gram.size(); ++i) {
        if (i) out << ' ';
        out << model.words()[gram[i]];
      }
      if (n < model.order()) out << '\t' << format_log(entry.log10_backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

NGramModel read_arpa(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_content = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_content() || line != "\\data\\") throw ParseError("expected \\data\\ header", line_no);
  std::vector<std::size_t> expected;
  bool have_section = false;
  while (next_content()) {
    if (line.rfind("ngram ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("bad ngram count line", line_no);
      std::size_t n = 0, count = 0;
      try {
        n = std::stoul(line.substr(6, eq - 6));
        count = std::stoul(line.substr(eq + 1));
      } catch (const std::exception&) {
        throw ParseError("bad ngram count line", line_no);
      }
      if (n != expected.size() + 1) throw ParseError("ngram counts out of order", line_no);
      expected.push_back(count);
      continue;
    }
    have_section = true;
    break;
  }
  if (expected.empty() || expected.size() > 3) throw ParseError("ARPA order must be 1..3", line_no);
  NGramModel model(static_cast<int>(expected.size()));

  // Register the vocabulary first so ids follow unigram file order.
  std::vector<std::pair<std::vector<std::string>, std::pair<double, double>>> pending;
  bool ended = false;
  int section = 0;
  while (have_section) {
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    const std::string header = "\\" + std::to_string(section + 1) + "-grams:";
    if (line != header) throw ParseError("expected section header " + header + " but got '" + line + "'", line_no);
    ++section;
    std::size_t read = 0;
    have_section = false;
    while (next_content()) {
      if (line[0] == '\\') {
        have_section = true;
        break;
      }
      auto tok = tokens_of(line);
      const std::size_t n = static_cast<std::size_t>(section);
      if (tok.size() != n + 1 && tok.size() != n + 2) throw ParseError("wrong field count in n-gram entry", line_no);
      const double prob = parse_log(tok[0], line_no);
      const double bow = tok.size() == n + 2 ? parse_log(tok[n + 1], line_no) : 0.0;
      std::vector<std::string> words(tok.begin() + 1, tok.begin() + 1 + n);
      if (section == 1) model.add_word(words[0]);
      pending.push_back({std::move(words), {prob, bow}});
      ++read;
    }
    if (read != expected[section - 1]) {
      throw ParseError("section " + std::to_string(section) + " has " + std::to_string(read) +
                           " entries but \\data\\ declares " + std::to_string(expected[section - 1]),
                       line_no);
    }
  }
  if (!ended) throw ParseError("missing \\end\\ marker", line_no);
  if (section != model.order()) throw ParseError("missing n-gram sections", line_no);

  for (auto& [words, values] : pending) {
    std::vector<int> key;
    for (const auto& w : words) {
      const int id = model.word_id(w);
      if (id == NGramModel::kUnknownId && w != NGramModel::kUnknown) {
        throw ParseError("word '" + w + "' missing from the unigram section", 0);
      }
      key.push_back(id);
    }
    model.table(static_cast<int>(words.size()))[key] = {values.first, values.second};
  }
  return model;
}

void save_arpa(const std::filesystem::path& path, const NGramModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write ARPA file " + path.string());
  write_arpa(out, model);
}

NGramModel load_arpa(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open ARPA file " + path.string());
  return read_arpa(in);
}

}  // namespace fcrn
