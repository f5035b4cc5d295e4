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

#include "fcrn/ink.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fcrn/error.hpp"

namespace fcrn {

namespace {

std::vector<std::string_view> split_spaces(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t') ++end;
    if (end > pos) out.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

double parse_number(std::string_view text, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ParseError("bad coordinate '" + std::string(text) + "'", line_no);
  }
  return value;
}

Point parse_point(std::string_view token, std::size_t line_no) {
  auto comma = token.find(',');
  if (comma == std::string_view::npos || token.find(',', comma + 1) != std::string_view::npos) {
    throw ParseError("expected x,y but got '" + std::string(token) + "'", line_no);
  }
  return {parse_number(token.substr(0, comma), line_no),
          parse_number(token.substr(comma + 1), line_no)};
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw AlphabetError("alphabet must contain at least one symbol");
  if (static_cast<int>(symbols_.size()) > kMaxSymbols) {
    throw AlphabetError("alphabet larger than " + std::to_string(kMaxSymbols) + " symbols");
  }
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const auto& s = symbols_[i];
    if (s.empty() || s == kBlankName || s.find_first_of(" \t\r\n,") != std::string::npos ||
        s.front() == '<') {
      throw AlphabetError("invalid symbol name '" + s + "'");
    }
    if (!lookup_.emplace(s, static_cast<int>(i) + 1).second) {
      throw AlphabetError("duplicate symbol '" + s + "'");
    }
  }
}

Alphabet Alphabet::make_default(int num_symbols) {
  if (num_symbols < 1 || num_symbols > kMaxSymbols) {
    throw AlphabetError("alphabet size must be in 1.." + std::to_string(kMaxSymbols));
  }
  std::vector<std::string> names;
  names.reserve(num_symbols);
  for (int i = 0; i < num_symbols; ++i) {
    if (i < 26) {
      names.emplace_back(1, static_cast<char>('a' + i));
    } else if (i < 52) {
      names.emplace_back(1, static_cast<char>('A' + i - 26));
    } else {
      names.push_back("c" + std::to_string(i));
    }
  }
  return Alphabet(std::move(names));
}

const std::string& Alphabet::name(int index) const {
  if (!contains(index)) throw AlphabetError("symbol index " + std::to_string(index) + " out of range");
  return symbols_[index - 1];
}

int Alphabet::index(std::string_view name) const {
  auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) throw AlphabetError("unknown symbol '" + std::string(name) + "'");
  return it->second;
}

Label Alphabet::parse(std::string_view space_separated) const {
  Label label;
  for (auto token : split_spaces(space_separated)) label.push_back(index(token));
  return label;
}

std::string Alphabet::format(const Label& label) const {
  std::string out;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (i) out += ' ';
    out += name(label[i]);
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("cannot format number");
  std::string out(buf, ptr);
  if (out == "-0") out = "0";
  return out;
}

std::vector<TextLineSample> read_ink(std::istream& in, const Alphabet& alphabet) {
  std::vector<TextLineSample> samples;
  bool in_record = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    auto tokens = split_spaces(line);
    if (tokens.empty()) {
      in_record = false;
      continue;
    }
    if (tokens[0] == "LABEL") {
      if (in_record) throw ParseError("LABEL inside a record; missing blank line", line_no);
      TextLineSample sample;
      try {
        for (std::size_t i = 1; i < tokens.size(); ++i) sample.label.push_back(alphabet.index(tokens[i]));
      } catch (const AlphabetError& e) {
        throw AlphabetError("line " + std::to_string(line_no) + ": " + e.what());
      }
      samples.push_back(std::move(sample));
      in_record = true;
    } else if (tokens[0] == "STROKE") {
      if (!in_record) throw ParseError("STROKE outside a record", line_no);
      if (tokens.size() < 2) throw ParseError("STROKE without points", line_no);
      Stroke stroke;
      stroke.points.reserve(tokens.size() - 1);
      for (std::size_t i = 1; i < tokens.size(); ++i) stroke.points.push_back(parse_point(tokens[i], line_no));
      samples.back().strokes.push_back(std::move(stroke));
    } else {
      throw ParseError("unknown record keyword '" + std::string(tokens[0]) + "'", line_no);
    }
  }
  return samples;
}

void write_ink(std::ostream& out, const std::vector<TextLineSample>& samples,
               const Alphabet& alphabet) {
  for (const auto& sample : samples) {
    out << "LABEL";
    for (int s : sample.label) out << ' ' << alphabet.name(s);
    out << '\n';
    for (const auto& stroke : sample.strokes) {
      out << "STROKE";
      for (const auto& p : stroke.points) out << ' ' << format_number(p.x) << ',' << format_number(p.y);
      out << '\n';
    }
    out << '\n';
  }
}

std::vector<TextLineSample> load_ink(const std::filesystem::path& path, const Alphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open ink file " + path.string());
  return read_ink(in, alphabet);
}

void save_ink(const std::filesystem::path& path, const std::vector<TextLineSample>& samples,
              const Alphabet& alphabet) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write ink file " + path.string());
  write_ink(out, samples, alphabet);
  if (!out) throw Error("write failed for " + path.string());
}

namespace {

std::vector<Label> load_labels(const std::filesystem::path& path, const Alphabet& alphabet, bool keep_empty) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file " + path.string());
  std::vector<Label> corpus;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = strip_cr(raw);
    if (split_spaces(line).empty()) {
      if (keep_empty) corpus.emplace_back();
      continue;
    }
    try {
      corpus.push_back(alphabet.parse(line));
    } catch (const AlphabetError& e) {
      throw AlphabetError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

}  // namespace

std::vector<Label> load_corpus(const std::filesystem::path& path, const Alphabet& alphabet) {
  return load_labels(path, alphabet, false);
}

std::vector<Label> load_transcriptions(const std::filesystem::path& path, const Alphabet& alphabet) {
  return load_labels(path, alphabet, true);
}

void save_corpus(const std::filesystem::path& path, const std::vector<Label>& corpus,
                 const Alphabet& alphabet) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file " + path.string());
  for (const auto& label : corpus) out << alphabet.format(label) << '\n';
}

BoundingBox bounding_box(const TextLineSample& sample) {
  BoundingBox box;
  for (const auto& stroke : sample.strokes) {
    for (const auto& p : stroke.points) {
      if (box.empty) {
        box = {p.x, p.y, p.x, p.y, false};
        continue;
      }
      box.min_x = std::min(box.min_x, p.x);
      box.min_y = std::min(box.min_y, p.y);
      box.max_x = std::max(box.max_x, p.x);
      box.max_y = std::max(box.max_y, p.y);
    }
  }
  return box;
}

NormalizedSample normalize_height(const TextLineSample& sample, double height) {
  if (!(height > 0.0)) throw ConfigError("normalization height must be positive");
  NormalizedSample result{sample, false};
  const auto box = bounding_box(sample);
  if (box.empty) return result;

  double scale = 1.0;
  double y_offset = 0.0;
  if (box.height() > 0.0) {
    scale = height / box.height();
  } else {
    result.degenerate = true;
    y_offset = height / 2.0;
  }
  for (auto& stroke : result.sample.strokes) {
    for (auto& p : stroke.points) {
      p.x = (p.x - box.min_x) * scale;
      p.y = (p.y - box.min_y) * scale + y_offset;
    }
  }
  return result;
}

}  // namespace fcrn
